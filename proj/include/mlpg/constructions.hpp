// Turing machines and Greibach-normal-form CFGs realized as multi-layer
// prefix grammars, with independent simulators/enumerators to check them
// against, plus the exponential-language grammar.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mlpg/mlpg.hpp"

namespace mlpg {

// ---- Turing machines ----

struct tm_rule {
    std::string q, a;    // current state, read symbol
    std::string q2, a2;  // next state, written symbol
    char dir = 'R';      // 'L' or 'R'
};

struct turing_machine {
    std::vector<std::string> states;
    std::vector<std::string> tape_alphabet;
    std::string start;
    std::string blank = "_";
    std::set<std::string> finals;
    std::vector<tm_rule> delta;  // deterministic: (q, a) keys are unique
    std::string input;           // optional default input, one symbol per char
};

// Text format:
//   states: q0 q1
//   tape: 1 _
//   start: q0
//   final: q1
//   blank: _          (optional, defaults to _)
//   input: 111        (optional)
//   delta: q0 1 -> q0 1 R
turing_machine parse_tm(const std::string& text);
turing_machine load_tm_file(const std::string& path);

// Direct simulator over a sparse tape.
struct tm_config {
    std::map<long, std::string> tape;
    long head = 0;
    std::string state;
    bool halted = false;
};

tm_config tm_init(const turing_machine& tm, const std::string& input);

// One step; false (and halted) once a final state is reached or no
// transition applies.
bool tm_step(const turing_machine& tm, tm_config& c);

// Canonical head-relative snapshot with the outer blanks trimmed.
struct tape_snapshot {
    std::vector<std::string> left;  // cells left of the head, leftmost first
    std::string cell;               // head cell
    std::vector<std::string> right; // cells right of the head
    std::string state;
};
bool operator==(const tape_snapshot& a, const tape_snapshot& b);
std::string to_string(const tape_snapshot& s);

tape_snapshot snapshot(const turing_machine& tm, const tm_config& c);

// The machine as a grammar over the tape alphabet plus q^R / q^L state
// markers and the Blank^L / Blank^R frontier markers: the visible layer holds
// the marker and the tape right of the head, the invisible chain (read
// deepest label first) the tape left of the head.  Right moves push the
// written letter onto the chain through a label strictly between the old top
// and its parent; left moves pop.  Transitions into final states halt.
mlpg_grammar tm_to_mlpg(const turing_machine& tm, const std::string& input);

// Reads a grammar word back into a snapshot; nullopt when the word is not a
// well-formed machine configuration.
std::optional<tape_snapshot> reconstruct_tape(const turing_machine& tm,
                                              const label_registry& reg, const gword& w);

// Runs both models side by side for up to `steps` machine steps.
struct bisim_report {
    std::size_t steps_checked = 0;  // steps compared tape-exact
    bool agreed = true;
    bool both_halted = false;       // both refused a further step together
    std::string detail;             // first divergence, when any
};
bisim_report bisimulate(const turing_machine& tm, const std::string& input,
                        std::size_t steps);

// ---- CFGs in Greibach normal form ----

struct cfg_prod {
    std::string lhs;
    std::string terminal;           // empty on erasure productions (lhs -> Λ)
    std::vector<std::string> tail;  // nonterminals after the terminal
};

struct cfg {
    std::vector<cfg_prod> prods;
    std::string start;  // defaults to the first production's lhs
};

// Text format, one production per line: `S -> a S B`, `B -> b`, `E ->`.
// Nonterminals are the symbols that occur as a left-hand side; every
// production must start with a terminal or be an erasure.
cfg parse_cfg(const std::string& text);
cfg load_cfg_file(const std::string& path);

std::set<std::string> nonterminals(const cfg& g);

// Rewrites every production into the strictly binary shape q -> u q1 q2 or
// q -> Λ: short tails are padded with a fresh erasure nonterminal, longer
// tails are split by substituting the first nonterminal's productions into a
// fresh pair nonterminal (memoized; growth-capped).
cfg binarize_gnf(const cfg& g);

// Requires the binary shape.  Nonterminals stack on the visible layer; each
// production appends its terminal under the shared child slot label; the
// halting rule pops every emitted terminal.  The empty word is never emitted
// (the pop needs content), so Λ is excluded from language comparisons.
mlpg_grammar cfg_to_mlpg(const cfg& g);

// Leftmost-derivation enumerator, stratified by word length; includes the
// empty word when it is derivable.
std::set<std::string> cfg_language(const cfg& g, std::size_t max_len);

// Random grammar in the binary shape: ≤4 nonterminals, ≤3 terminals.
cfg random_gnf(std::mt19937& rng);

// ---- exponential language ----

// Language {b^(2^n), n ≥ 1}: one pop rule doubles the budget of b's, the
// halting pop stops the doubling, and the consume rule regenerates two b's
// under the shared deeper slot for every visible b.
mlpg_grammar explang_grammar();

}  // namespace mlpg
