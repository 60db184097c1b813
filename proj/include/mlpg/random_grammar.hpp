#pragma once

#include <random>

#include "mlpg.hpp"
#include "prefix_grammar.hpp"

namespace mlpg {

// Random alphabetic grammar: one-letter heads, no halting rules, k1 = k2 = 2,
// alphabet of 2..4 letters. Every alphabet letter heads at least one rule.
mlpg_grammar random_alphabetic_mlpg(std::mt19937& rng);

// Random plain prefix grammar over <=4 symbols, heads of length 1..2.
prefix_grammar random_plain_pg(std::mt19937& rng);

}  // namespace mlpg
