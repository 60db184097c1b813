#include "mlpg/supercompile.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mlpg {

namespace {

void max_calls_into(const term_ptr& t, std::vector<term_ptr>& out) {
    if (t->kind == term_kind::call) {
        out.push_back(t);
        return;
    }
    for (const auto& a : t->args) max_calls_into(a, out);
}

std::vector<term_ptr> max_calls(const term_ptr& t) {
    std::vector<term_ptr> out;
    max_calls_into(t, out);
    return out;
}

term_ptr strip_anns(const term_ptr& t) {
    auto u = std::make_shared<term>(*t);
    u->ann = {};
    for (auto& a : u->args) a = strip_anns(a);
    return u;
}

term_ptr replace_node(const term_ptr& t, const term* target, const term_ptr& repl) {
    if (t.get() == target) return repl;
    if (t->args.empty()) return t;
    bool changed = false;
    std::vector<term_ptr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) {
        args.push_back(replace_node(a, target, repl));
        changed = changed || args.back() != a;
    }
    if (!changed) return t;
    auto u = std::make_shared<term>(*t);
    u->args = std::move(args);
    return u;
}

term_ptr find_call_by_uid(const term_ptr& t, occ_uid uid) {
    if (t->kind == term_kind::call && t->ann.uid == uid) return t;
    for (const auto& a : t->args)
        if (auto r = find_call_by_uid(a, uid)) return r;
    return nullptr;
}

// Subterms that keep every call of t while peeling constructor context.
std::vector<term_ptr> ctor_spine_splits(const term_ptr& t) {
    std::vector<term_ptr> out;
    term_ptr cur = t;
    for (;;) {
        out.push_back(cur);
        if (cur->kind != term_kind::ctor) break;
        term_ptr next;
        int with_calls = 0;
        for (const auto& a : cur->args)
            if (has_call(a)) {
                ++with_calls;
                next = a;
            }
        if (with_calls != 1) break;
        cur = next;
    }
    return out;
}

term_ptr strip_to_core(const term_ptr& t) {
    auto mc = max_calls(t);
    return mc.size() == 1 ? mc[0] : t;
}

struct scp_state {
    const program_l& p;
    scp_options opt;
    drive_session sess;
    std::vector<scp_node> nodes;
    std::vector<std::size_t> work;
    bool budget_ok = true;

    explicit scp_state(const program_l& prog, scp_options o) : p(prog), opt(o) {}

    // hard cap: never allocates past max_nodes, flags the budget instead
    std::size_t make_node(std::size_t parent) {
        if (nodes.size() >= opt.max_nodes) {
            budget_ok = false;
            return scp_npos;
        }
        scp_node n;
        n.id = nodes.size();
        n.parent = parent;
        nodes.push_back(std::move(n));
        return nodes.back().id;
    }

    void kill_subtree_of(std::size_t id) {
        for (std::size_t c : nodes[id].children) {
            nodes[c].alive = false;
            kill_subtree_of(c);
        }
        nodes[id].children.clear();
        nodes[id].bindings.clear();
        nodes[id].body_child = scp_npos;
    }

    std::vector<std::size_t> path_to(std::size_t id) const {
        std::vector<std::size_t> path;
        for (std::size_t k = id; k != scp_npos; k = nodes[k].parent) path.push_back(k);
        std::reverse(path.begin(), path.end());
        return path;
    }

    // ---- let construction ----

    std::size_t add_binding_child(std::size_t let_id, scp_let_binding& b) {
        term_ptr child_config = b.core;
        if (opt.whistle == scp_whistle::hve && b.core->kind == term_kind::call &&
            std::none_of(b.core->args.begin(), b.core->args.end(), has_call)) {
            // generic call: fresh variables at the definition, original
            // arguments at the use site
            b.generic = true;
            std::vector<term_ptr> vars;
            for (std::size_t k = 0; k < b.core->args.size(); ++k) {
                b.gen_params.push_back(sess.fresh_var());
                b.use_args.push_back(b.core->args[k]);
                vars.push_back(mk_var(b.gen_params.back()));
            }
            child_config = annotate(p, sess.reg, sess.uids,
                                    mk_call(b.core->name, std::move(vars)),
                                    sess.reg.new_root());
        }
        std::size_t cid = make_node(let_id);
        if (cid == scp_npos) return cid;
        nodes[cid].config = child_config;
        nodes[cid].word = extract_stack_word(p, nodes[cid].config);
        nodes[let_id].children.push_back(cid);
        b.child = cid;
        return cid;
    }

    void finish_let(std::size_t id, std::vector<scp_let_binding> bindings, term_ptr body,
                    bool reannotate_body) {
        nodes[id].kind = scp_node_kind::let_node;
        for (auto& b : bindings) {
            add_binding_child(id, b);
            nodes[id].bindings.push_back(b);
        }
        if (reannotate_body)
            body = annotate(p, sess.reg, sess.uids, strip_anns(body), sess.reg.new_root());
        std::size_t bid = make_node(id);
        if (bid == scp_npos) return;
        nodes[bid].config = body;
        nodes[bid].word = extract_stack_word(p, nodes[bid].config);
        nodes[id].children.push_back(bid);
        nodes[id].body_child = bid;
        // binding children first so the body develops first off the stack
        for (std::size_t c : nodes[id].children) work.push_back(c);
    }

    // Splits the stack of node id below the innermost permanently stable
    // letter: the bound term is the boundary call's blocking argument.
    bool stack_split(std::size_t id, const turchin_verdict& v) {
        const scp_node& n = nodes[id];
        std::size_t phi = n.word.visible.size() - v.theta_len;
        if (phi >= n.word.visible.size()) return false;
        occ_uid boundary_uid = n.word.visible.letters[phi].uid;
        term_ptr boundary = find_call_by_uid(n.config, boundary_uid);
        if (!boundary) return false;
        term_ptr arg;
        for (std::size_t c : needed_columns(p, boundary->name))
            if (boundary->args.at(c)->kind == term_kind::call) {
                arg = boundary->args[c];
                break;
            }
        if (!arg) return false;
        return split_off(id, arg);
    }

    bool split_off(std::size_t id, const term_ptr& arg) {
        std::string z = sess.fresh_var();
        term_ptr body = replace_node(nodes[id].config, arg.get(), mk_var(z));
        if (body == nodes[id].config) return false;
        kill_subtree_of(id);
        scp_let_binding b;
        b.var = z;
        b.full = arg;
        b.core = strip_to_core(arg);
        finish_let(id, {std::move(b)}, body, false);
        return true;
    }

    // Rebuilds the later node as a let over the earlier core's skeleton.
    bool downward_let(std::size_t j, const term_ptr& core_i, const term_ptr& core_j,
                      const subst_map& sigma) {
        subst_map skel;
        std::vector<scp_let_binding> bindings;
        for (const auto& v : free_vars(core_i)) {
            const term_ptr& val = sigma.at(v);
            if (val->kind == term_kind::var) {
                skel[v] = val;
                continue;
            }
            scp_let_binding b;
            b.var = sess.fresh_var();
            b.full = val;
            b.core = strip_to_core(val);
            skel[v] = mk_var(b.var);
            bindings.push_back(std::move(b));
        }
        if (bindings.empty()) return false;
        term_ptr skeleton = apply_subst(strip_anns(core_i), skel);
        term_ptr body = replace_node(nodes[j].config, core_j.get(), skeleton);
        kill_subtree_of(j);
        finish_let(j, std::move(bindings), body, true);
        return true;
    }

    // Rebuilds the earlier node as a let over the generalization.
    bool upward_let(std::size_t i, const term_ptr& core_i, const msg_result& m) {
        subst_map ren;
        std::vector<scp_let_binding> bindings;
        bool any_call = false;
        for (const auto& v : free_vars(m.gen)) {
            auto it = m.sub1.find(v);
            if (it == m.sub1.end()) continue;
            scp_let_binding b;
            b.var = sess.fresh_var();
            b.full = it->second;
            b.core = strip_to_core(b.full);
            any_call = any_call || it->second->kind != term_kind::var;
            ren[v] = mk_var(b.var);
            bindings.push_back(std::move(b));
        }
        if (bindings.empty() || !any_call) return false;
        term_ptr gen = apply_subst(m.gen, ren);
        term_ptr body = replace_node(nodes[i].config, core_i.get(), gen);
        kill_subtree_of(i);
        finish_let(i, std::move(bindings), body, true);
        return true;
    }

    bool root_split(std::size_t id) {
        auto mc = max_calls(nodes[id].config);
        if (mc.empty()) return false;
        const term_ptr& root_call = mc[0];
        for (std::size_t c : needed_columns(p, root_call->name)) {
            const term_ptr& arg = root_call->args.at(c);
            if (arg->kind != term_kind::var) return split_off(id, arg);
        }
        return false;
    }

    // ---- processing ----

    bool try_fold(std::size_t id) {
        std::vector<std::size_t> path = path_to(id);
        auto splits = ctor_spine_splits(nodes[id].config);
        for (std::size_t k = path.size() - 1; k-- > 0;) {  // nearest ancestor first
            const scp_node& a = nodes[path[k]];
            if (a.kind == scp_node_kind::let_node) continue;
            for (const auto& beta : splits)
                if (match_renaming(a.config, beta)) {
                    nodes[id].kind = scp_node_kind::folded;
                    nodes[id].fold_target = path[k];
                    return true;
                }
        }
        return false;
    }

    bool generalize(std::size_t i, std::size_t j) {
        term_ptr core_i = strip_to_core(nodes[i].config);
        term_ptr core_j = strip_to_core(nodes[j].config);
        if (auto sigma = match_instance(core_i, core_j)) {
            bool proper = std::any_of(sigma->begin(), sigma->end(), [](const auto& kv) {
                return kv.second->kind != term_kind::var;
            });
            if (proper && downward_let(j, core_i, core_j, *sigma)) return true;
        }
        msg_result m = msg(core_i, core_j);
        if (!msg_trivial(m) && upward_let(i, core_i, m)) return true;
        if (root_split(i)) return true;
        if (root_split(j)) return true;
        nodes[j].kind = scp_node_kind::stuck;
        return true;
    }

    bool try_whistle(std::size_t id) {
        std::vector<std::size_t> path = path_to(id);
        if (path.size() < 2) return false;
        whistle_trace tr;
        tr.max_head_len = 1;
        for (std::size_t k = 0; k < path.size(); ++k) {
            tr.words.push_back(nodes[path[k]].word);
            if (k) tr.consumed.push_back(nodes[path[k]].step_consumed);
        }
        std::size_t last = path.size() - 1;
        for (std::size_t k = 0; k < last; ++k) {
            std::size_t i = path[k];
            if (nodes[i].kind == scp_node_kind::let_node) continue;
            if (opt.whistle == scp_whistle::hve) {
                if (!hve(nodes[i].config, nodes[id].config)) continue;
                return generalize(i, id);
            }
            auto v = turchin_pair(tr, k, last);
            if (!v) continue;
            if (opt.whistle == scp_whistle::composite &&
                !hve(nodes[i].config, nodes[id].config))
                continue;
            if (v->theta_len > 0 && stack_split(i, *v)) return true;
            return generalize(i, id);
        }
        return false;
    }

    void drive(std::size_t id) {
        drive_result res = drive_step(p, sess, nodes[id].config);
        if (res.status == drive_status::terminal) {
            nodes[id].kind = scp_node_kind::terminal;
            return;
        }
        if (res.status == drive_status::stuck) {
            nodes[id].kind = scp_node_kind::stuck;
            return;
        }
        nodes[id].kind = scp_node_kind::driven;
        std::vector<std::size_t> created;
        for (const auto& br : res.branches) {
            std::size_t cid = make_node(id);
            if (cid == scp_npos) break;
            scp_node& c = nodes[cid];
            c.config = br.config;
            c.word = extract_stack_word(p, c.config);
            if (br.consumed) c.step_consumed.insert(br.consumed);
            c.branch_var = br.var;
            c.branch_pattern = br.pattern;
            nodes[id].children.push_back(cid);
            created.push_back(cid);
        }
        for (auto it = created.rbegin(); it != created.rend(); ++it) work.push_back(*it);
    }

    void process(std::size_t id) {
        if (!has_call(nodes[id].config)) {
            nodes[id].kind = scp_node_kind::terminal;
            return;
        }
        if (try_fold(id)) return;
        if (try_whistle(id)) return;
        drive(id);
    }

    void run(const term_ptr& entry) {
        std::size_t root = make_node(scp_npos);
        if (root == scp_npos) return;
        nodes[root].config = init_config(p, sess, entry);
        nodes[root].word = extract_stack_word(p, nodes[root].config);
        work.push_back(root);
        while (!work.empty() && budget_ok) {
            std::size_t id = work.back();
            work.pop_back();
            if (!nodes[id].alive || nodes[id].kind != scp_node_kind::open) continue;
            process(id);
        }
    }
};

// ---- residualization ----

struct emitter {
    const scp_state& st;
    std::map<std::size_t, std::string> names;
    std::map<std::string, int> counters;
    std::vector<std::size_t> queue;
    std::set<std::size_t> queued;
    std::set<std::size_t> fold_targets;
    program_l out;

    explicit emitter(const scp_state& s) : st(s) {
        for (const auto& n : st.nodes)
            if (n.alive && n.kind == scp_node_kind::folded)
                fold_targets.insert(n.fold_target);
    }

    bool is_function(std::size_t id) const {
        const scp_node& n = st.nodes[id];
        if (id == 0) return true;
        if (fold_targets.count(id)) return true;
        if (n.parent != scp_npos &&
            st.nodes[n.parent].kind == scp_node_kind::let_node &&
            n.kind == scp_node_kind::driven)
            return true;
        return false;
    }

    std::string ensure_name(std::size_t id) {
        auto it = names.find(id);
        if (it != names.end()) return it->second;
        auto mc = max_calls(st.nodes[id].config);
        std::string base = mc.empty() ? "f" : mc[0]->name;
        std::string name = base + std::to_string(++counters[base]);
        names[id] = name;
        if (!queued.count(id)) {
            queue.push_back(id);
            queued.insert(id);
        }
        return name;
    }

    std::vector<term_ptr> param_vars(std::size_t id) const {
        std::vector<term_ptr> out;
        for (const auto& v : free_vars(st.nodes[id].config)) out.push_back(mk_var(v));
        return out;
    }

    term_ptr fn_call(std::size_t id) { return mk_call(ensure_name(id), param_vars(id)); }

    term_ptr fold_expr(std::size_t id) {
        const scp_node& n = st.nodes[id];
        const scp_node& a = st.nodes[n.fold_target];
        for (const auto& beta : ctor_spine_splits(n.config))
            if (auto rho = match_renaming(a.config, beta)) {
                std::vector<term_ptr> args;
                for (const auto& pv : free_vars(a.config)) args.push_back(mk_var(rho->at(pv)));
                term_ptr call = mk_call(ensure_name(n.fold_target), std::move(args));
                return replace_node(n.config, beta.get(), call);
            }
        throw std::runtime_error("fold target no longer matches");
    }

    term_ptr let_expr(std::size_t id) {
        const scp_node& n = st.nodes[id];
        term_ptr expr = node_expr(n.body_child);
        for (const auto& b : n.bindings) {
            subst_map gen_map;
            for (std::size_t k = 0; k < b.gen_params.size(); ++k)
                gen_map[b.gen_params[k]] = b.use_args[k];
            term_ptr bound = apply_subst(node_expr(b.child), gen_map);
            term_ptr use = replace_node(b.full, b.core.get(), bound);
            expr = apply_subst(expr, {{b.var, use}});
        }
        return expr;
    }

    term_ptr node_expr(std::size_t id) {
        if (is_function(id)) return fn_call(id);
        const scp_node& n = st.nodes[id];
        switch (n.kind) {
            case scp_node_kind::folded:
                return fold_expr(id);
            case scp_node_kind::let_node:
                return let_expr(id);
            case scp_node_kind::driven:
                if (n.children.size() == 1 && st.nodes[n.children[0]].branch_var.empty())
                    return node_expr(n.children[0]);
                return n.config;
            default:
                return n.config;
        }
    }

    void add_rule(const std::string& fname, const std::vector<term_ptr>& patterns,
                  const term_ptr& body) {
        rule_l r;
        r.fname = fname;
        for (const auto& p : patterns) r.patterns.push_back(strip_anns(p));
        r.body = strip_anns(body);
        out.rules.push_back(std::move(r));
    }

    void walk(std::size_t owner, const std::string& fname, std::size_t id,
              std::vector<term_ptr> patterns) {
        if (id != owner && is_function(id)) {
            add_rule(fname, patterns, fn_call(id));
            return;
        }
        const scp_node& n = st.nodes[id];
        switch (n.kind) {
            case scp_node_kind::driven:
                for (std::size_t c : n.children) {
                    const scp_node& ch = st.nodes[c];
                    if (ch.branch_var.empty()) {
                        walk(owner, fname, c, patterns);
                    } else {
                        subst_map s{{ch.branch_var, ch.branch_pattern}};
                        std::vector<term_ptr> pats;
                        for (const auto& p : patterns) pats.push_back(apply_subst(p, s));
                        walk(owner, fname, c, std::move(pats));
                    }
                }
                return;
            case scp_node_kind::folded:
                add_rule(fname, patterns, fold_expr(id));
                return;
            case scp_node_kind::let_node:
                add_rule(fname, patterns, let_expr(id));
                return;
            default:
                add_rule(fname, patterns, n.config);
                return;
        }
    }

    void emit_function(std::size_t id) {
        walk(id, names.at(id), id, param_vars(id));
    }

    std::string run() {
        std::string entry = ensure_name(0);
        for (std::size_t k = 0; k < queue.size(); ++k) emit_function(queue[k]);
        return entry;
    }
};

}  // namespace

scp_result supercompile(const program_l& p, const term_ptr& entry, const scp_options& opt) {
    scp_state st(p, opt);
    st.run(entry);
    scp_result res;
    res.closed = st.budget_ok;
    res.nodes_used = st.nodes.size();
    if (st.budget_ok) {
        emitter em(st);
        res.entry = em.run();
        res.residual = std::move(em.out);
    }
    res.nodes = std::move(st.nodes);
    return res;
}

drive_trace drive_path(const program_l& p, const term_ptr& entry, std::size_t max_words) {
    drive_trace out;
    out.trace.max_head_len = 1;
    drive_session sess;
    term_ptr config = init_config(p, sess, entry);
    out.configs.push_back(config);
    out.trace.words.push_back(extract_stack_word(p, config));
    while (out.trace.words.size() < max_words) {
        drive_result res = drive_step(p, sess, config);
        if (res.branches.empty()) break;
        const drive_branch& br = res.branches.back();  // successor branch
        config = br.config;
        std::set<occ_uid> consumed;
        if (br.consumed) consumed.insert(br.consumed);
        out.trace.consumed.push_back(std::move(consumed));
        out.trace.words.push_back(extract_stack_word(p, config));
        out.configs.push_back(config);
    }
    return out;
}

bool program_isomorphic(const program_l& a, const std::string& entry_a, const program_l& b,
                        const std::string& entry_b) {
    if (a.rules.size() != b.rules.size()) return false;
    std::map<std::string, std::string> fwd{{entry_a, entry_b}};
    std::map<std::string, std::string> bwd{{entry_b, entry_a}};
    auto map_name = [&](const std::string& x, const std::string& y) {
        auto [fit, f_new] = fwd.emplace(x, y);
        if (!f_new && fit->second != y) return false;
        auto [bit, b_new] = bwd.emplace(y, x);
        return b_new || bit->second == x;
    };
    struct cmp {
        std::map<std::string, std::string>& fwd;
        std::map<std::string, std::string>& bwd;
        std::map<std::string, std::string> vf, vb;
        decltype(map_name)& names;
        bool term(const term_ptr& x, const term_ptr& y) {
            if (x->kind != y->kind || x->args.size() != y->args.size()) return false;
            if (x->kind == term_kind::var) {
                auto [fit, f_new] = vf.emplace(x->name, y->name);
                if (!f_new && fit->second != y->name) return false;
                auto [bit, b_new] = vb.emplace(y->name, x->name);
                return b_new || bit->second == x->name;
            }
            if (x->kind == term_kind::ctor && x->name != y->name) return false;
            if (x->kind == term_kind::call && !names(x->name, y->name)) return false;
            for (std::size_t k = 0; k < x->args.size(); ++k)
                if (!term(x->args[k], y->args[k])) return false;
            return true;
        }
    };
    for (std::size_t k = 0; k < a.rules.size(); ++k) {
        const rule_l& ra = a.rules[k];
        const rule_l& rb = b.rules[k];
        if (ra.patterns.size() != rb.patterns.size()) return false;
        if (!map_name(ra.fname, rb.fname)) return false;
        cmp c{fwd, bwd, {}, {}, map_name};
        for (std::size_t i = 0; i < ra.patterns.size(); ++i)
            if (!c.term(ra.patterns[i], rb.patterns[i])) return false;
        if (!c.term(ra.body, rb.body)) return false;
    }
    return true;
}

static const char* kind_str(scp_node_kind k) {
    switch (k) {
        case scp_node_kind::open: return "open";
        case scp_node_kind::driven: return "driven";
        case scp_node_kind::terminal: return "terminal";
        case scp_node_kind::stuck: return "stuck";
        case scp_node_kind::folded: return "folded";
        case scp_node_kind::let_node: return "let";
    }
    return "?";
}

void emit_tree(const scp_result& r, std::ostream& os) {
    struct rec {
        const scp_result& r;
        std::ostream& os;
        void walk(std::size_t id, int depth) {
            const scp_node& n = r.nodes[id];
            for (int k = 0; k < depth; ++k) os << "  ";
            os << "#" << id << " [" << kind_str(n.kind) << "]";
            if (!n.branch_var.empty())
                os << " " << n.branch_var << "=" << term_str(n.branch_pattern);
            os << " " << term_str(n.config);
            os << "  {" << plain_str(n.word.visible) << "}";
            if (n.kind == scp_node_kind::folded) os << " -> #" << n.fold_target;
            os << "\n";
            for (std::size_t c : n.children)
                if (r.nodes[c].alive) walk(c, depth + 1);
        }
    };
    if (!r.nodes.empty()) rec{r, os}.walk(0, 0);
}

void emit_dot(const scp_result& r, std::ostream& os) {
    os << "digraph scp {\n  node [shape=box];\n";
    for (const auto& n : r.nodes) {
        if (!n.alive) continue;
        std::string label = term_str(n.config);
        std::string esc;
        for (char c : label) {
            if (c == '"' || c == '\\') esc += '\\';
            esc += c;
        }
        os << "  n" << n.id << " [label=\"" << esc << "\"";
        if (n.kind == scp_node_kind::let_node) os << ", style=dashed";
        os << "];\n";
        for (std::size_t c : n.children)
            if (r.nodes[c].alive) os << "  n" << n.id << " -> n" << c << ";\n";
        if (n.kind == scp_node_kind::folded)
            os << "  n" << n.id << " -> n" << n.fold_target << " [style=dotted];\n";
    }
    os << "}\n";
}

}  // namespace mlpg
