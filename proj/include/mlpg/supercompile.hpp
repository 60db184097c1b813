#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mlpg/lang.hpp"
#include "mlpg/whistles.hpp"

namespace mlpg {

inline constexpr std::size_t scp_npos = static_cast<std::size_t>(-1);

enum class scp_whistle { turchin, hve, composite };

enum class scp_node_kind { open, driven, terminal, stuck, folded, let_node };

struct scp_let_binding {
    std::string var;
    term_ptr full;   // bound term as it appeared in the configuration
    term_ptr core;   // call core of full (subterm node of full)
    std::size_t child = scp_npos;
    bool generic = false;
    std::vector<std::string> gen_params;
    std::vector<term_ptr> use_args;
};

struct scp_node {
    std::size_t id = 0;
    std::size_t parent = scp_npos;
    bool alive = true;
    term_ptr config;
    gword word;
    std::set<occ_uid> step_consumed;  // uids consumed by the step into this node
    std::string branch_var;           // narrowing on the edge from the parent
    term_ptr branch_pattern;
    scp_node_kind kind = scp_node_kind::open;
    std::vector<std::size_t> children;
    std::size_t fold_target = scp_npos;
    std::vector<scp_let_binding> bindings;  // let_node only
    std::size_t body_child = scp_npos;      // let_node only
};

struct scp_options {
    scp_whistle whistle = scp_whistle::turchin;
    std::size_t max_nodes = 512;
};

struct scp_result {
    std::vector<scp_node> nodes;
    program_l residual;
    std::string entry;  // entry function of the residual
    bool closed = false;
    std::size_t nodes_used = 0;
};

// Builds the process tree for entry over p and residualizes it.
scp_result supercompile(const program_l& p, const term_ptr& entry, const scp_options& opt);

// Drives entry along one path, taking the successor branch at every
// narrowing, and records the stack-word trace. Stops after max_words words
// or at a terminal or stuck configuration.
struct drive_trace {
    std::vector<term_ptr> configs;
    whistle_trace trace;
};
drive_trace drive_path(const program_l& p, const term_ptr& entry, std::size_t max_words);

// Order-sensitive structural isomorphism: same rule count, a consistent
// function-name bijection mapping entry to entry, and per-rule alpha
// equivalence.
bool program_isomorphic(const program_l& a, const std::string& entry_a, const program_l& b,
                        const std::string& entry_b);

void emit_tree(const scp_result& r, std::ostream& os);
void emit_dot(const scp_result& r, std::ostream& os);

}  // namespace mlpg
