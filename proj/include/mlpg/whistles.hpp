#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlpg/lang.hpp"
#include "mlpg/layered_word.hpp"
#include "mlpg/mlpg.hpp"

namespace mlpg {

// A trace of stack words with the uid sets consumed between consecutive
// words. consumed[k] holds the uids removed by the step from words[k] to
// words[k+1], so consumed.size() == words.size() - 1.
struct whistle_trace {
    std::vector<gword> words;
    std::vector<std::set<occ_uid>> consumed;
    std::size_t max_head_len = 1;
};

// View a grammar session as a whistle trace; consumed[k] collects the uids
// the k-th step removed from the visible layer.
whistle_trace make_whistle_trace(const trace_session& s, std::size_t head_len);

// True when the uid occurs in the visible part of every word in [i..j].
bool uid_visible_throughout(const whistle_trace& tr, occ_uid uid, std::size_t i,
                            std::size_t j);

// Length of the longest visible suffix of words[i] that stays permanently in
// place through words[j]: its uid sequence is a literal suffix of every word
// in between, none of its uids is consumed, and every intermediate word keeps
// at least max_head_len letters in front of it.
std::size_t stable_suffix_len(const whistle_trace& tr, std::size_t i, std::size_t j);

struct turchin_verdict {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t theta_len = 0;
    std::string top;    // shared prefix, as plain symbols
    std::string mid;    // inserted middle segment of words[j]
    std::string theta;  // permanently stable suffix
};

// Splits (words[i], words[j]) as (Phi Theta, Phi Psi Theta) with the longest
// permanently stable Theta, if the visible words admit it.
std::optional<turchin_verdict> turchin_pair(const whistle_trace& tr, std::size_t i,
                                            std::size_t j);

// First pair in lexicographic (j, i) order that forms a Turchin pair.
std::optional<turchin_verdict> find_first_pair(const whistle_trace& tr);

// First pair whose stack words form a Turchin pair and whose configurations
// also embed homeomorphically; same (j, i) scan order.
std::optional<turchin_verdict> find_first_pair_composite(
    const whistle_trace& tr, const std::vector<term_ptr>& configs);

// Homeomorphic embedding on terms: variables embed into variables, a term
// embeds by diving into an argument, or by coupling same-shaped heads.
// Constructors and calls never couple with each other.
bool hve(const term_ptr& a, const term_ptr& b);

struct msg_result {
    term_ptr gen;
    subst_map sub1;  // gen[sub1] == a
    subst_map sub2;  // gen[sub2] == b
};

// Most specific generalization; equal mismatch pairs share one variable.
msg_result msg(const term_ptr& a, const term_ptr& b);

// True when the generalization is a bare variable.
bool msg_trivial(const msg_result& m);

}  // namespace mlpg
