#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mlpg/layered_word.hpp"

namespace mlpg {

// Single-layer prefix grammars over plain alphabets.  Words carry occurrence
// uids so that "the same occurrence" is a checkable notion across a trace.

struct plain_letter {
    std::string sym;
    occ_uid uid = 0;
};

using plain_word = std::vector<plain_letter>;

struct prefix_rule {
    std::vector<std::string> lhs;  // non-empty
    std::vector<std::string> rhs;  // may be empty
};

struct prefix_grammar {
    std::vector<prefix_rule> rules;
    std::vector<std::string> init;
};

// lhs lengths all equal 1
bool is_alphabetic(const prefix_grammar& g);

struct plain_step {
    std::size_t rule_index = 0;
    std::vector<occ_uid> consumed;  // uids covered by the lhs
    std::vector<occ_uid> produced;  // fresh uids of the rhs
};

struct plain_trace {
    std::vector<plain_word> words;  // words[0] = init
    std::vector<plain_step> steps;  // steps[k] turns words[k] into words[k+1]
    uid_source uids;
};

std::vector<std::string> plain_syms(const plain_word& w);
std::string to_string(const plain_word& w);

plain_word make_plain_word(const std::vector<std::string>& syms, uid_source& uids);

// First rule (in listed order) whose lhs is a prefix of w, or nullopt.
std::optional<std::size_t> first_applicable(const prefix_grammar& g, const plain_word& w);

// Applies rule r at the front of w: rhs letters get fresh uids, the suffix
// beyond the lhs keeps its uids.  Precondition: the lhs matches.
plain_word pg_apply(const prefix_grammar& g, std::size_t r, const plain_word& w,
                    uid_source& uids, plain_step& log);

// Ordered-policy run.  max_words counts words including the initial one; the
// run also stops when no rule applies.
plain_trace pg_run(const prefix_grammar& g, std::size_t max_words);

// All-policy exploration: every applicable rule branches.  Nodes hold the
// word plus the rule that produced them; depth-bounded.
struct pg_tree_node {
    plain_word word;
    std::optional<std::size_t> via_rule;
    std::size_t depth = 0;
    std::vector<std::size_t> children;  // indices into pg_tree::nodes
};

struct pg_tree {
    std::vector<pg_tree_node> nodes;  // nodes[0] = root
};

pg_tree pg_run_all(const prefix_grammar& g, std::size_t max_depth, std::size_t max_nodes = 4096);

// An occurrence is changed w.r.t. the segment [i,j] iff some step of the
// segment applied a rule to it (its uid appears in a consumed set).
bool changed_in_segment(const plain_trace& tr, occ_uid uid, std::size_t i, std::size_t j);

// Turchin pair on plain traces: words[i] = Phi Theta, words[j] = Phi Psi Theta
// where Theta is a literal occurrence suffix (same uids) untouched throughout
// [i,j) and the two Phi segments are equal as plain words.  The split with
// maximal |Theta| is returned.
struct plain_turchin_verdict {
    std::size_t i = 0;
    std::size_t j = 0;
    std::vector<std::string> top;    // Phi
    std::vector<std::string> mid;    // Psi
    std::vector<std::string> theta;  // Theta
};

std::optional<plain_turchin_verdict> turchin_pair_plain(const plain_trace& tr,
                                                        std::size_t i, std::size_t j);

// First pair in the scan order j ascending, then i ascending below j.
std::optional<plain_turchin_verdict> find_first_pair_plain(const plain_trace& tr);

// Text format:
//   # comment
//   init: h f
//   f -> ;
//   f -> g f;
//   g -> h;
// Rule separators ';' are optional at line ends; symbols are whitespace-split.
prefix_grammar parse_pg(const std::string& text);
prefix_grammar load_pg_file(const std::string& path);

std::string to_string(const prefix_grammar& g);

}  // namespace mlpg
