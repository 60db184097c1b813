#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlpg/labels.hpp"
#include "mlpg/layered_word.hpp"

namespace mlpg {

// A small first-order call-by-name functional language over constructor
// terms, with Peano sugar: 0 is Z, w+1 is S(w), a numeral n is S^n(Z).

enum class term_kind { var, ctor, call };

struct term;
using term_ptr = std::shared_ptr<const term>;

// Call occurrences carry an optional stack identity: the occurrence uid and
// the layer label of the letter this call contributes to the stack word.
struct call_ann {
    occ_uid uid = 0;  // 0 = unannotated
    label_id label = no_label;
};

struct term {
    term_kind kind = term_kind::var;
    std::string name;
    std::vector<term_ptr> args;
    call_ann ann;
};

term_ptr mk_var(std::string name);
term_ptr mk_ctor(std::string name, std::vector<term_ptr> args = {});
term_ptr mk_call(std::string name, std::vector<term_ptr> args = {});
term_ptr with_ann(const term_ptr& t, call_ann ann);
term_ptr mk_num(long n);

bool term_eq(const term_ptr& a, const term_ptr& b);  // ignores annotations
std::string term_str(const term_ptr& t);             // Peano sugar applied
term_ptr parse_term(const std::string& text);

using subst_map = std::map<std::string, term_ptr>;
term_ptr apply_subst(const term_ptr& t, const subst_map& s);

std::vector<std::string> free_vars(const term_ptr& t);  // first-occurrence order
bool is_ground_ctor(const term_ptr& t);
bool has_call(const term_ptr& t);
std::optional<long> as_num(const term_ptr& t);

// b = a under a variable renaming extending ren (bijective); nullopt if not.
std::optional<std::map<std::string, std::string>> match_renaming(const term_ptr& a,
                                                                 const term_ptr& b);
// b = a . sigma for some substitution sigma over a's variables.
std::optional<subst_map> match_instance(const term_ptr& a, const term_ptr& b);

// ---- programs ----

struct rule_l {
    std::string fname;
    std::vector<term_ptr> patterns;
    term_ptr body;
};

struct program_l {
    std::vector<rule_l> rules;  // source order; matching is ordered
};

// allow_deep permits nested constructor patterns (residual programs); source
// programs must keep patterns flat (a variable, or one constructor of
// variables).
program_l parse_program_l(const std::string& text, bool allow_deep = false);
program_l load_program_file(const std::string& path, bool allow_deep = false);
void validate_program(const program_l& p, bool allow_deep = false);
std::string to_string(const program_l& p);

// A program together with an optional `entry: TERM;` line from the same file.
struct program_bundle {
    program_l program;
    term_ptr entry;  // null when the file declares no entry
};

program_bundle parse_program_bundle(const std::string& text, bool allow_deep = false);
program_bundle load_program_bundle(const std::string& path, bool allow_deep = false);

// f-function: single rule, all-variable patterns.  Everything else is a
// g-function.
bool is_f_function(const program_l& p, const std::string& fname);
std::size_t arity_of(const program_l& p, const std::string& fname);

// Columns holding a non-variable pattern in at least one rule of f.
std::vector<std::size_t> needed_columns(const program_l& p, const std::string& fname);

// A call is ready when every needed column holds a non-call at its head.
bool is_ready(const program_l& p, const term_ptr& call);

// Head call of the first needed column blocked by a call, if any.
term_ptr blocking_child(const program_l& p, const term_ptr& call);

// ---- stack words ----

// Reads the call annotations of t and produces its two-layer stack word:
// the blocked cascade from the first maximal call is the visible layer
// (innermost letter first); every other call group is invisible, in
// depth-first discovery order.  Call-free subtrees contribute nothing.
gword extract_stack_word(const program_l& p, const term_ptr& t);

// Assigns identities to unannotated calls: cascade members share their
// parent's label, other new call subtrees root fresh child labels.  Calls
// whose uid was already seen (duplicates made by substitution) are treated
// as new.  root_ctx labels the cascade when the root call is unannotated.
term_ptr annotate(const program_l& p, label_registry& reg, uid_source& uids,
                  const term_ptr& t, label_id root_ctx);

// ---- driving ----

struct drive_branch {
    std::string var;     // narrowed variable; empty for a plain rewrite step
    term_ptr pattern;    // Z or S(x_k) when var is set
    term_ptr config;     // annotated successor configuration
    occ_uid consumed;    // redex occurrence rewritten (0 if none)
};

enum class drive_status { branches, terminal, stuck };

struct drive_result {
    drive_status status = drive_status::branches;
    std::vector<drive_branch> branches;
    term_ptr redex;  // informational
};

struct drive_session {
    label_registry reg;
    uid_source uids;
    int var_counter = 0;
    std::string fresh_var();
};

// One driving step: locate the redex (deepest call of the visible cascade),
// then either rewrite it (one branch, no narrowing) or narrow the scrutinized
// variable with the disjoint Peano complements Z / S(fresh), each branch
// performing the substitution plus at most one rewrite.
drive_result drive_step(const program_l& p, drive_session& s, const term_ptr& config);

// Initial annotated configuration with a fresh root label.
term_ptr init_config(const program_l& p, drive_session& s, const term_ptr& entry);

// ---- evaluation ----

struct eval_limits {
    std::size_t rewrites = 100000;
};

// Call-by-name normalization of a ground term to a constructor normal form;
// nullopt when stuck or out of budget.
std::optional<term_ptr> eval_ground(const program_l& p, const term_ptr& t, eval_limits lim = {});

}  // namespace mlpg
