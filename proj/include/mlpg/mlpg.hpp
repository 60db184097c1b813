#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlpg/labels.hpp"
#include "mlpg/layer_functions.hpp"
#include "mlpg/layered_word.hpp"

namespace mlpg {

// Multi-layer prefix grammars: rewriting systems over two-layer words whose
// letters carry tree-ordered labels.  Rules consume a literal visible prefix,
// optionally pop one invisible label group to the front, emit replacement
// letters, and transform the invisible layer with a chain of layer functions.

enum class rule_kind { simple, pop };

struct head_item {
    bool concrete = true;
    std::string sym;     // concrete letter
    std::string var;     // letter-variable name when concrete == false
    std::string binder;  // label binder bound by this position
};

// Where a replacement letter's label comes from.
struct label_role {
    enum class kind { head, fresh_child, named };
    kind k = kind::head;
    int head_index = 0;  // head / fresh_child: which head item's label
    std::string name;    // named
    static label_role of_head(int i) { return {kind::head, i, ""}; }
    static label_role fresh_of(int i) { return {kind::fresh_child, i, ""}; }
    static label_role named_l(std::string n) { return {kind::named, 0, std::move(n)}; }
};

struct repl_item {
    int sym_head_index = -1;  // >=0: copy the symbol bound by that head item
    std::string sym;          // concrete symbol when sym_head_index < 0
    label_role role;
};

// A fresh descendant label allocated once per rule application and shared by
// every replacement item and chain target that names it.
struct named_decl {
    std::string name;
    int parent_head_index = -1;  // >=0: parent is that head item's label
    std::string parent_name;     // else: an earlier named label
};

struct mlpg_rule {
    std::string name;
    rule_kind kind = rule_kind::simple;
    bool halting = false;
    int anchor = 0;  // head item anchoring pop selection and the chain
    std::vector<head_item> head;
    std::vector<repl_item> repl;
    std::vector<named_decl> named;
    layer_chain chain;
};

struct init_letter {
    std::string sym;
    std::string label_path;  // dotted, e.g. "0", "0.1"
};

struct mlpg_grammar {
    std::vector<std::string> alphabet;  // optional; empty = unchecked
    int k1 = 4;                         // max chain length
    int k2 = 4;                         // max payload length per append/insert
    std::vector<mlpg_rule> rules;
    std::vector<init_letter> init_visible;
    std::vector<init_letter> init_invisible;
};

bool is_alphabetic(const mlpg_grammar& g);
std::size_t max_head_len(const mlpg_grammar& g);

// One trace step's bookkeeping.
struct mlpg_step_log {
    std::size_t rule_index = 0;
    std::string rule_name;
    std::size_t head_len = 0;
    std::vector<occ_uid> consumed;           // visible head letters
    std::vector<occ_uid> produced;           // fresh visible letters
    std::vector<occ_uid> popped;             // moved invisible -> visible
    std::vector<occ_uid> invisible_produced; // fresh letters made by the chain
};

struct mlpg_state {
    label_registry reg;
    uid_source uids;
    gword word;
};

struct trace_session {
    mlpg_state state;
    std::vector<gword> words;  // words[0] = init
    std::vector<mlpg_step_log> steps;
    bool halted = false;
    bool stuck = false;
    // uid lineage: letters produced by a step descend from the letters the
    // step consumed.
    std::map<occ_uid, std::vector<occ_uid>> parents;
    std::map<occ_uid, label_id> birth_label;
    std::set<occ_uid> born_invisible;
};

trace_session make_session(const mlpg_grammar& g);
mlpg_state make_state(const mlpg_grammar& g);

// A concrete way a rule can fire on a word.
struct rule_match {
    std::size_t rule_index = 0;
    std::vector<label_id> head_labels;
    std::vector<std::string> head_syms;
    std::vector<occ_uid> head_uids;
    std::optional<label_id> pop_child;  // pop rules only
};

// All matches of one rule, pop candidates ordered oldest child first.
std::vector<rule_match> match_rule(const label_registry& reg, const mlpg_grammar& g,
                                   std::size_t rule_index, const gword& w);

// Applies a match to a state copy; returns the new state and log, or nullopt
// when the layer chain fails (the step then counts as inapplicable).
struct step_result {
    mlpg_state state;
    mlpg_step_log log;
};
std::optional<step_result> try_step(const mlpg_grammar& g, const mlpg_state& st,
                                    const rule_match& m);

// Ordered policy: first rule (then first match) that completes, up to
// max_words words counting the initial one, stopping at halting rules or when
// nothing applies.
void run_ordered(const mlpg_grammar& g, trace_session& s, std::size_t max_words);

// Language: plain visible words observed at halting-rule applications.
// All-policy breadth-first exploration; every branch owns a cloned registry.
// budget counts node expansions; jobs > 1 fans branches out to workers.
struct language_result {
    std::set<std::string> words;
    std::size_t expansions = 0;
    bool exhausted = false;  // budget ran out with work remaining
};
language_result enumerate_language(const mlpg_grammar& g, std::size_t max_len,
                                   std::size_t budget, unsigned jobs = 1,
                                   bool prune_invisible_over_max = true);

// Text format, round-tripped by construct/emit:
//   alphabet: a b
//   k1: 2
//   k2: 2
//   init: [a@0] $ [b@0.1][b@0.1]
//   rule r1 pop(oldest): head a@h => pop ++ [a@h] ; layer: id
//   rule r2 pop(oldest) halt: head a@h => pop ; layer: id
//   rule r3: head b@h => ; layer: app(h.child#1, "bb")
// Replacement labels may be binders (@h), fresh children (@h.child_new),
// or named fresh descendants (@h.rho1 declares rho1, @rho1 reuses it).
// Quoted payloads split per character when all alphanumeric lowercase,
// else on spaces ("Blank^L b" is two symbols, "gf" is two, "q1^R" is one).
mlpg_grammar parse_mlpg(const std::string& text);
mlpg_grammar load_mlpg_file(const std::string& path);
std::string to_string(const mlpg_grammar& g);

std::string plain_visible_str(const gword& w);

}  // namespace mlpg
