#include "mlpg/mlpg.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <deque>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mlpg {

bool is_alphabetic(const mlpg_grammar& g) {
    return std::all_of(g.rules.begin(), g.rules.end(),
                       [](const mlpg_rule& r) { return r.head.size() == 1; });
}

std::size_t max_head_len(const mlpg_grammar& g) {
    std::size_t n = 1;
    for (const auto& r : g.rules) n = std::max(n, r.head.size());
    return n;
}

std::string plain_visible_str(const gword& w) { return plain_str(plain(w.visible)); }

// Init label paths use allocation ordinals, so roots and slots are warmed in
// numeric order to keep path display and slot identity aligned.
static label_id label_for_path(label_registry& reg, std::map<std::string, label_id>& memo,
                               std::vector<label_id>& roots, const std::string& path) {
    auto it = memo.find(path);
    if (it != memo.end()) return it->second;
    std::vector<int> parts;
    std::istringstream is(path);
    std::string tok;
    while (std::getline(is, tok, '.')) parts.push_back(std::stoi(tok));
    if (parts.empty()) throw std::runtime_error("empty label path");
    if (parts[0] < 0) throw std::runtime_error("bad root ordinal in path " + path);
    while (static_cast<int>(roots.size()) <= parts[0]) roots.push_back(reg.new_root());
    label_id cur = roots[static_cast<std::size_t>(parts[0])];
    for (std::size_t k = 1; k < parts.size(); ++k) {
        if (parts[k] < 1) throw std::runtime_error("bad child ordinal in path " + path);
        for (int s = 1; s <= parts[k]; ++s) reg.child_slot(cur, s);
        cur = reg.child_slot(cur, parts[k]);
    }
    memo.emplace(path, cur);
    return cur;
}

mlpg_state make_state(const mlpg_grammar& g) {
    mlpg_state st;
    std::map<std::string, label_id> memo;
    std::vector<label_id> roots;
    for (const auto& il : g.init_visible)
        st.word.visible.letters.push_back(
            {il.sym, label_for_path(st.reg, memo, roots, il.label_path), st.uids.fresh()});
    for (const auto& il : g.init_invisible)
        st.word.invisible.letters.push_back(
            {il.sym, label_for_path(st.reg, memo, roots, il.label_path), st.uids.fresh()});
    return st;
}

trace_session make_session(const mlpg_grammar& g) {
    trace_session s;
    s.state = make_state(g);
    s.words.push_back(s.state.word);
    for (const auto& l : s.state.word.visible.letters) s.birth_label[l.uid] = l.label;
    for (const auto& l : s.state.word.invisible.letters) {
        s.birth_label[l.uid] = l.label;
        s.born_invisible.insert(l.uid);
    }
    return s;
}

std::vector<rule_match> match_rule(const label_registry& reg, const mlpg_grammar& g,
                                   std::size_t rule_index, const gword& w) {
    const mlpg_rule& r = g.rules.at(rule_index);
    std::vector<rule_match> out;
    if (r.head.empty() || r.head.size() > w.visible.size()) return out;
    rule_match m;
    m.rule_index = rule_index;
    std::map<std::string, std::string> var_env;
    std::map<std::string, label_id> binder_env;
    for (std::size_t k = 0; k < r.head.size(); ++k) {
        const lletter& l = w.visible.letters[k];
        const head_item& h = r.head[k];
        if (h.concrete) {
            if (l.sym != h.sym) return out;
        } else {
            auto [it, fresh] = var_env.emplace(h.var, l.sym);
            if (!fresh && it->second != l.sym) return out;
        }
        auto [bit, bfresh] = binder_env.emplace(h.binder, l.label);
        if (!bfresh && bit->second != l.label) return out;
        m.head_labels.push_back(l.label);
        m.head_syms.push_back(l.sym);
        m.head_uids.push_back(l.uid);
    }
    if (r.kind == rule_kind::simple) {
        out.push_back(std::move(m));
        return out;
    }
    // Pop: one match per child of the anchor w.r.t. the invisible labels,
    // oldest (first-created) candidates first.
    label_id anchor = m.head_labels.at(static_cast<std::size_t>(r.anchor));
    std::set<label_id> subset = labels_of(w.invisible);
    subset.insert(anchor);
    for (label_id c : reg.child_of(anchor, subset)) {
        rule_match mm = m;
        mm.pop_child = c;
        out.push_back(std::move(mm));
    }
    return out;
}

std::optional<step_result> try_step(const mlpg_grammar& g, const mlpg_state& st,
                                    const rule_match& m) {
    const mlpg_rule& r = g.rules.at(m.rule_index);
    step_result res{st, {}};
    label_registry& reg = res.state.reg;
    uid_source& uids = res.state.uids;
    gword& w = res.state.word;
    res.log.rule_index = m.rule_index;
    res.log.rule_name = r.name;
    res.log.head_len = r.head.size();
    res.log.consumed = m.head_uids;

    label_id anchor = m.head_labels.at(static_cast<std::size_t>(r.anchor));

    // Named labels are allocated up front, once per application.
    named_labels named;
    for (const auto& d : r.named) {
        label_id parent;
        if (d.parent_head_index >= 0) {
            parent = m.head_labels.at(static_cast<std::size_t>(d.parent_head_index));
        } else {
            auto p = named.find(d.parent_name);
            if (!p) throw std::runtime_error("named label parent not declared: " + d.parent_name);
            parent = *p;
        }
        named.entries.emplace_back(d.name, reg.new_child(parent));
    }

    lword popped;
    lword invisible = w.invisible;
    if (r.kind == rule_kind::pop) {
        if (!m.pop_child) throw std::runtime_error("pop match without child");
        popped = project(invisible, *m.pop_child);
        invisible = coproject(invisible, *m.pop_child);
        for (const auto& l : popped.letters) res.log.popped.push_back(l.uid);
    }

    std::map<int, label_id> fresh_cache;  // shared fresh child per head item
    lword repl;
    for (const auto& it : r.repl) {
        lletter l;
        l.sym = it.sym_head_index >= 0
                    ? m.head_syms.at(static_cast<std::size_t>(it.sym_head_index))
                    : it.sym;
        switch (it.role.k) {
            case label_role::kind::head:
                l.label = m.head_labels.at(static_cast<std::size_t>(it.role.head_index));
                break;
            case label_role::kind::fresh_child: {
                auto [fit, fresh] = fresh_cache.emplace(it.role.head_index, no_label);
                if (fresh)
                    fit->second = reg.new_child(
                        m.head_labels.at(static_cast<std::size_t>(it.role.head_index)));
                l.label = fit->second;
                break;
            }
            case label_role::kind::named: {
                auto p = named.find(it.role.name);
                if (!p) throw std::runtime_error("undeclared named label: " + it.role.name);
                l.label = *p;
                break;
            }
        }
        l.uid = uids.fresh();
        res.log.produced.push_back(l.uid);
        repl.letters.push_back(std::move(l));
    }

    occ_uid uid_mark = uids.next;
    try {
        invisible = apply_chain(reg, uids, invisible, r.chain, anchor, g.k1, g.k2, &named);
    } catch (const layer_fn_error&) {
        return std::nullopt;  // step aborts atomically; rule is inapplicable
    }
    for (const auto& l : invisible.letters)
        if (l.uid >= uid_mark) res.log.invisible_produced.push_back(l.uid);

    lword visible;
    visible.letters = popped.letters;
    visible.letters.insert(visible.letters.end(), repl.letters.begin(), repl.letters.end());
    visible.letters.insert(visible.letters.end(),
                           w.visible.letters.begin() + static_cast<std::ptrdiff_t>(r.head.size()),
                           w.visible.letters.end());
    w.visible = std::move(visible);
    w.invisible = std::move(invisible);
    return res;
}

static void commit_lineage(trace_session& s, const mlpg_step_log& log) {
    for (occ_uid u : log.produced) {
        s.parents[u] = log.consumed;
        for (const auto& l : s.state.word.visible.letters)
            if (l.uid == u) s.birth_label[u] = l.label;
    }
    for (occ_uid u : log.invisible_produced) {
        s.parents[u] = log.consumed;
        s.born_invisible.insert(u);
        for (const auto& l : s.state.word.invisible.letters)
            if (l.uid == u) s.birth_label[u] = l.label;
    }
}

void run_ordered(const mlpg_grammar& g, trace_session& s, std::size_t max_words) {
    while (s.words.size() < max_words && !s.halted) {
        bool fired = false;
        for (std::size_t r = 0; r < g.rules.size() && !fired; ++r) {
            for (const auto& m : match_rule(s.state.reg, g, r, s.state.word)) {
                auto res = try_step(g, s.state, m);
                if (!res) continue;
                s.state = std::move(res->state);
                s.steps.push_back(res->log);
                s.words.push_back(s.state.word);
                commit_lineage(s, s.steps.back());
                if (g.rules[r].halting) s.halted = true;
                fired = true;
                break;
            }
        }
        if (!fired) {
            s.stuck = true;
            break;
        }
    }
}

language_result enumerate_language(const mlpg_grammar& g, std::size_t max_len,
                                   std::size_t budget, unsigned jobs,
                                   bool prune_invisible_over_max) {
    language_result out;
    std::vector<mlpg_state> frontier{make_state(g)};
    if (jobs == 0) jobs = 1;
    std::mutex mtx;
    while (!frontier.empty()) {
        if (out.expansions >= budget) {
            out.exhausted = true;
            break;
        }
        std::size_t take = std::min(frontier.size(), budget - out.expansions);
        std::vector<mlpg_state> batch(frontier.begin(),
                                      frontier.begin() + static_cast<std::ptrdiff_t>(take));
        std::vector<mlpg_state> rest(frontier.begin() + static_cast<std::ptrdiff_t>(take),
                                     frontier.end());
        out.expansions += batch.size();
        std::vector<mlpg_state> next;
        auto work = [&](std::size_t begin, std::size_t end) {
            std::vector<mlpg_state> local_next;
            std::set<std::string> local_words;
            for (std::size_t i = begin; i < end; ++i) {
                const mlpg_state& st = batch[i];
                for (std::size_t r = 0; r < g.rules.size(); ++r) {
                    for (const auto& m : match_rule(st.reg, g, r, st.word)) {
                        auto res = try_step(g, st, m);
                        if (!res) continue;
                        if (g.rules[r].halting) {
                            auto syms = plain(res->state.word.visible);
                            if (syms.size() <= max_len) local_words.insert(plain_str(syms));
                            continue;
                        }
                        std::size_t vis = res->state.word.visible.size();
                        std::size_t inv = res->state.word.invisible.size();
                        if (prune_invisible_over_max && inv > max_len) continue;
                        if (vis + inv > 4 * max_len + 16) continue;  // safety bound
                        local_next.push_back(std::move(res->state));
                    }
                }
            }
            std::lock_guard<std::mutex> lock(mtx);
            out.words.insert(local_words.begin(), local_words.end());
            next.insert(next.end(), std::make_move_iterator(local_next.begin()),
                        std::make_move_iterator(local_next.end()));
        };
        if (jobs == 1 || batch.size() < 2) {
            work(0, batch.size());
        } else {
            std::vector<std::thread> pool;
            std::size_t per = (batch.size() + jobs - 1) / jobs;
            for (unsigned t = 0; t < jobs; ++t) {
                std::size_t b = t * per, e = std::min(batch.size(), b + per);
                if (b >= e) break;
                pool.emplace_back(work, b, e);
            }
            for (auto& th : pool) th.join();
        }
        frontier = std::move(rest);
        frontier.insert(frontier.end(), std::make_move_iterator(next.begin()),
                        std::make_move_iterator(next.end()));
        if (frontier.empty()) break;
    }
    return out;
}

// ---- parsing ----

namespace {

std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

bool all_plain_chars(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::islower(c) || std::isdigit(c);
    });
}

std::vector<std::string> split_payload(const std::string& s) {
    if (s.find(' ') != std::string::npos) return split_ws(s);
    std::vector<std::string> out;
    if (all_plain_chars(s)) {
        for (char c : s) out.emplace_back(1, c);
    } else if (!s.empty()) {
        out.push_back(s);
    }
    return out;
}

struct rule_ctx {
    mlpg_rule* rule;
    std::map<std::string, int> binders;  // binder name -> head index
    std::map<std::string, bool> names;   // declared named labels
};

int binder_index(rule_ctx& ctx, const std::string& b, const std::string& where) {
    auto it = ctx.binders.find(b);
    if (it == ctx.binders.end())
        throw std::runtime_error("unknown binder '" + b + "' in " + where);
    return it->second;
}

void declare_named(rule_ctx& ctx, const std::string& parent, const std::string& name) {
    if (ctx.names.count(name)) return;
    named_decl d;
    d.name = name;
    if (ctx.binders.count(parent)) {
        d.parent_head_index = ctx.binders[parent];
    } else if (ctx.names.count(parent)) {
        d.parent_name = parent;
    } else {
        throw std::runtime_error("named label '" + name + "' has unknown parent '" + parent + "'");
    }
    ctx.rule->named.push_back(d);
    ctx.names[name] = true;
}

label_role parse_role(rule_ctx& ctx, const std::string& tok) {
    std::size_t dot = tok.find('.');
    if (dot == std::string::npos) {
        if (ctx.binders.count(tok)) return label_role::of_head(ctx.binders[tok]);
        if (ctx.names.count(tok)) return label_role::named_l(tok);
        throw std::runtime_error("unknown label role '" + tok + "'");
    }
    std::string base = tok.substr(0, dot), rest = tok.substr(dot + 1);
    if (rest == "child_new") return label_role::fresh_of(binder_index(ctx, base, "role"));
    if (rest.rfind("child#", 0) == 0 || rest == "child_in_word")
        throw std::runtime_error("slot/in-word roles are chain targets, not replacement roles");
    declare_named(ctx, base, rest);
    return label_role::named_l(rest);
}

// Chain targets anchor at the rule's anchor binder; an explicit binder prefix
// must agree with it (it is notation, not an independent anchor).
child_target parse_chain_target(rule_ctx& ctx, std::string tok) {
    std::size_t dot = tok.find('.');
    if (dot != std::string::npos) {
        std::string base = tok.substr(0, dot), rest = tok.substr(dot + 1);
        if (ctx.binders.count(base)) {
            int bi = ctx.binders[base];
            if (bi != ctx.rule->anchor)
                throw std::runtime_error("chain target binder '" + base +
                                         "' must be the rule anchor");
            tok = rest;
        } else if (ctx.names.count(base)) {
            declare_named(ctx, base, rest);
            return child_target::named_l(rest);
        } else {
            throw std::runtime_error("unknown chain target '" + tok + "'");
        }
    }
    if (tok == "child_new") return child_target::fresh();
    if (tok == "child" || tok == "child_in_word") return child_target::in_word();
    if (tok.rfind("child#", 0) == 0) return child_target::slot_k(std::stoi(tok.substr(6)));
    if (ctx.names.count(tok)) return child_target::named_l(tok);
    // h.NAME with binder prefix declares; bare unknown token is an error.
    throw std::runtime_error("unknown chain target '" + tok + "'");
}

child_target parse_chain_target_decl(rule_ctx& ctx, const std::string& tok) {
    // Allow `h.rho1` to declare rho1 under binder h when used as a target.
    std::size_t dot = tok.find('.');
    if (dot != std::string::npos) {
        std::string base = tok.substr(0, dot), rest = tok.substr(dot + 1);
        bool special = rest == "child_new" || rest == "child" || rest == "child_in_word" ||
                       rest.rfind("child#", 0) == 0;
        if (!special && ctx.binders.count(base)) {
            declare_named(ctx, base, rest);
            return child_target::named_l(rest);
        }
    }
    return parse_chain_target(ctx, tok);
}

std::vector<std::string> split_top_commas(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    bool quote = false;
    std::string cur;
    for (char c : s) {
        if (c == '"') quote = !quote;
        if (!quote) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                out.push_back(strip(cur));
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    if (!strip(cur).empty()) out.push_back(strip(cur));
    return out;
}

void parse_chain(rule_ctx& ctx, const std::string& text) {
    std::string t = strip(text);
    if (t.empty() || t == "id") return;
    for (const std::string& opstr : split_top_commas(t)) {
        std::size_t lp = opstr.find('(');
        if (lp == std::string::npos || opstr.back() != ')')
            throw std::runtime_error("bad layer op: " + opstr);
        std::string op = strip(opstr.substr(0, lp));
        std::string inner = opstr.substr(lp + 1, opstr.size() - lp - 2);
        layer_fn fn;
        if (op == "app" || op == "ins") {
            fn.kind = op == "app" ? layer_fn_kind::append : layer_fn_kind::insert;
            // target then payload, separated by ',' or ':'
            std::size_t q1 = inner.find('"');
            std::size_t q2 = q1 == std::string::npos ? std::string::npos : inner.find('"', q1 + 1);
            if (q1 == std::string::npos || q2 == std::string::npos)
                throw std::runtime_error("missing payload in: " + opstr);
            std::string target = strip(inner.substr(0, q1));
            while (!target.empty() && (target.back() == ',' || target.back() == ':'))
                target = strip(target.substr(0, target.size() - 1));
            fn.target = parse_chain_target_decl(ctx, target);
            fn.payload = split_payload(inner.substr(q1 + 1, q2 - q1 - 1));
        } else if (op == "del" || op == "copy") {
            fn.kind = op == "del" ? layer_fn_kind::erase : layer_fn_kind::copy;
            fn.target = parse_chain_target_decl(ctx, strip(inner));
        } else {
            throw std::runtime_error("unknown layer op: " + op);
        }
        ctx.rule->chain.push_back(std::move(fn));
    }
}

std::vector<std::string> bracket_items(const std::string& s, const std::string& where) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            continue;
        }
        if (s[pos] != '[') throw std::runtime_error("expected '[' in " + where + ": " + s);
        std::size_t close = s.find(']', pos);
        if (close == std::string::npos) throw std::runtime_error("missing ']' in " + where);
        out.push_back(s.substr(pos + 1, close - pos - 1));
        pos = close + 1;
    }
    return out;
}

init_letter parse_init_letter(const std::string& item) {
    std::size_t at = item.rfind('@');
    if (at == std::string::npos) throw std::runtime_error("init letter needs @path: " + item);
    return {strip(item.substr(0, at)), strip(item.substr(at + 1))};
}

void parse_rule_line(mlpg_grammar& g, const std::string& line) {
    std::size_t colon = line.find(':');
    if (colon == std::string::npos) throw std::runtime_error("rule line needs ':': " + line);
    std::vector<std::string> heading = split_ws(line.substr(0, colon));
    mlpg_rule r;
    std::string anchor_binder;
    for (std::size_t k = 1; k < heading.size(); ++k) {
        const std::string& w = heading[k];
        if (k == 1) {
            r.name = w;
        } else if (w == "pop" || w == "pop(oldest)") {
            r.kind = rule_kind::pop;
        } else if (w == "halt") {
            r.halting = true;
        } else if (w.rfind("anchor=", 0) == 0) {
            anchor_binder = w.substr(7);
        } else {
            throw std::runtime_error("unknown rule attribute '" + w + "'");
        }
    }
    if (r.name.empty()) throw std::runtime_error("rule needs a name: " + line);

    std::string body = strip(line.substr(colon + 1));
    if (body.rfind("head", 0) != 0) throw std::runtime_error("rule body must start with 'head'");
    body = strip(body.substr(4));
    std::size_t arrow = body.find("=>");
    if (arrow == std::string::npos) throw std::runtime_error("rule needs '=>': " + line);
    std::string head_part = strip(body.substr(0, arrow));
    std::string rest = strip(body.substr(arrow + 2));
    std::string repl_part = rest, chain_part;
    std::size_t lay = rest.find("layer:");
    if (lay != std::string::npos) {
        repl_part = strip(rest.substr(0, lay));
        chain_part = strip(rest.substr(lay + 6));
    } else if (rest.find(';') != std::string::npos) {
        throw std::runtime_error("expected 'layer:' after ';' in: " + line);
    }
    if (!repl_part.empty() && repl_part.back() == ';')
        repl_part = strip(repl_part.substr(0, repl_part.size() - 1));

    rule_ctx ctx{&r, {}, {}};
    for (const std::string& tok : split_ws(head_part)) {
        std::size_t at = tok.rfind('@');
        if (at == std::string::npos) throw std::runtime_error("head item needs @binder: " + tok);
        head_item h;
        std::string sym = tok.substr(0, at);
        h.binder = tok.substr(at + 1);
        if (!sym.empty() && sym[0] == '?') {
            h.concrete = false;
            h.var = sym.substr(1);
        } else {
            h.sym = sym;
        }
        if (!ctx.binders.count(h.binder))
            ctx.binders[h.binder] = static_cast<int>(r.head.size());
        r.head.push_back(std::move(h));
    }
    if (r.head.empty()) throw std::runtime_error("rule needs a head: " + line);
    r.anchor = anchor_binder.empty() ? 0 : binder_index(ctx, anchor_binder, "anchor");

    std::string repl_items = repl_part;
    if (repl_items.rfind("pop", 0) == 0) {
        if (r.kind != rule_kind::pop)
            throw std::runtime_error("'pop' replacement in a simple rule: " + line);
        repl_items = strip(repl_items.substr(3));
        if (repl_items.rfind("++", 0) == 0) repl_items = strip(repl_items.substr(2));
    } else if (r.kind == rule_kind::pop && !repl_items.empty() && repl_items[0] != '[') {
        throw std::runtime_error("pop rule replacement must start with 'pop': " + line);
    }
    for (const std::string& item : bracket_items(repl_items, "replacement")) {
        std::size_t at = item.rfind('@');
        if (at == std::string::npos)
            throw std::runtime_error("replacement item needs @role: " + item);
        repl_item it;
        std::string sym = strip(item.substr(0, at));
        if (!sym.empty() && sym[0] == '?') {
            std::string v = sym.substr(1);
            it.sym_head_index = -1;
            for (std::size_t k = 0; k < r.head.size(); ++k)
                if (!r.head[k].concrete && r.head[k].var == v)
                    it.sym_head_index = static_cast<int>(k);
            if (it.sym_head_index < 0)
                throw std::runtime_error("unknown letter variable '?" + v + "'");
        } else {
            it.sym = sym;
        }
        it.role = parse_role(ctx, strip(item.substr(at + 1)));
        r.repl.push_back(std::move(it));
    }
    parse_chain(ctx, chain_part);
    g.rules.push_back(std::move(r));
}

}  // namespace

mlpg_grammar parse_mlpg(const std::string& text) {
    mlpg_grammar g;
    std::istringstream is(text);
    std::string line;
    bool saw_init = false;
    while (std::getline(is, line)) {
        // '#' opens a comment only at line start or after whitespace, so the
        // child#k slot syntax survives.
        std::size_t hash = std::string::npos;
        for (std::size_t k = line.find('#'); k != std::string::npos; k = line.find('#', k + 1))
            if (k == 0 || std::isspace(static_cast<unsigned char>(line[k - 1]))) {
                hash = k;
                break;
            }
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.rfind("alphabet:", 0) == 0) {
            g.alphabet = split_ws(line.substr(9));
        } else if (line.rfind("k1:", 0) == 0) {
            g.k1 = std::stoi(strip(line.substr(3)));
        } else if (line.rfind("k2:", 0) == 0) {
            g.k2 = std::stoi(strip(line.substr(3)));
        } else if (line.rfind("init:", 0) == 0) {
            std::string init = strip(line.substr(5));
            std::size_t dollar = init.find('$');
            std::string vis = dollar == std::string::npos ? init : init.substr(0, dollar);
            std::string inv = dollar == std::string::npos ? "" : init.substr(dollar + 1);
            for (const auto& item : bracket_items(strip(vis), "init"))
                g.init_visible.push_back(parse_init_letter(item));
            for (const auto& item : bracket_items(strip(inv), "init"))
                g.init_invisible.push_back(parse_init_letter(item));
            saw_init = true;
        } else if (line.rfind("rule", 0) == 0) {
            parse_rule_line(g, line);
        } else {
            throw std::runtime_error("unrecognized line: " + line);
        }
    }
    if (!saw_init) throw std::runtime_error("grammar needs an 'init:' line");
    if (!g.alphabet.empty()) {
        std::set<std::string> al(g.alphabet.begin(), g.alphabet.end());
        auto check = [&](const std::string& s, const char* where) {
            if (!al.count(s))
                throw std::runtime_error(std::string(where) + " symbol not in alphabet: " + s);
        };
        for (const auto& il : g.init_visible) check(il.sym, "init");
        for (const auto& il : g.init_invisible) check(il.sym, "init");
        for (const auto& r : g.rules) {
            for (const auto& h : r.head)
                if (h.concrete) check(h.sym, "head");
            for (const auto& it : r.repl)
                if (it.sym_head_index < 0) check(it.sym, "replacement");
            for (const auto& fn : r.chain)
                for (const auto& p : fn.payload) check(p, "payload");
        }
    }
    return g;
}

mlpg_grammar load_mlpg_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_mlpg(buf.str());
}

// ---- serialization ----

namespace {

std::string payload_str(const std::vector<std::string>& payload) {
    bool plain = std::all_of(payload.begin(), payload.end(),
                             [](const std::string& s) { return s.size() == 1 && all_plain_chars(s); });
    std::string out;
    for (std::size_t k = 0; k < payload.size(); ++k) {
        if (!plain && k) out += ' ';
        out += payload[k];
    }
    return out;
}

std::string binder_of(const mlpg_rule& r, int head_index) {
    return r.head.at(static_cast<std::size_t>(head_index)).binder;
}

std::string role_str(const mlpg_rule& r, const label_role& role) {
    switch (role.k) {
        case label_role::kind::head: return binder_of(r, role.head_index);
        case label_role::kind::fresh_child: return binder_of(r, role.head_index) + ".child_new";
        case label_role::kind::named: return role.name;
    }
    return "?";
}

std::string target_str(const mlpg_rule& r, const child_target& t, std::set<std::string>& declared) {
    switch (t.kind) {
        case child_target_kind::fresh: return binder_of(r, r.anchor) + ".child_new";
        case child_target_kind::slot:
            return binder_of(r, r.anchor) + ".child#" + std::to_string(t.slot);
        case child_target_kind::in_word: return binder_of(r, r.anchor) + ".child_in_word";
        case child_target_kind::named: {
            if (declared.count(t.name)) return t.name;
            declared.insert(t.name);
            for (const auto& d : r.named)
                if (d.name == t.name)
                    return (d.parent_head_index >= 0 ? binder_of(r, d.parent_head_index)
                                                     : d.parent_name) +
                           "." + t.name;
            return t.name;
        }
        case child_target_kind::concrete: break;
    }
    return "?";
}

}  // namespace

std::string to_string(const mlpg_grammar& g) {
    std::ostringstream os;
    if (!g.alphabet.empty()) {
        os << "alphabet:";
        for (const auto& s : g.alphabet) os << ' ' << s;
        os << '\n';
    }
    os << "k1: " << g.k1 << "\nk2: " << g.k2 << "\ninit:";
    for (const auto& il : g.init_visible) os << " [" << il.sym << '@' << il.label_path << ']';
    os << " $";
    for (const auto& il : g.init_invisible) os << " [" << il.sym << '@' << il.label_path << ']';
    os << '\n';
    for (const auto& r : g.rules) {
        os << "rule " << r.name;
        if (r.kind == rule_kind::pop) os << " pop(oldest)";
        if (r.halting) os << " halt";
        if (r.anchor != 0) os << " anchor=" << binder_of(r, r.anchor);
        os << ": head";
        for (const auto& h : r.head)
            os << ' ' << (h.concrete ? h.sym : "?" + h.var) << '@' << h.binder;
        os << " =>";
        if (r.kind == rule_kind::pop) os << " pop" << (r.repl.empty() ? "" : " ++");
        std::set<std::string> declared;
        // named labels first referenced in the replacement get declared there
        for (const auto& it : r.repl) {
            os << " [";
            os << (it.sym_head_index >= 0 ? "?" + r.head[static_cast<std::size_t>(it.sym_head_index)].var
                                          : it.sym);
            os << '@';
            if (it.role.k == label_role::kind::named && !declared.count(it.role.name)) {
                declared.insert(it.role.name);
                bool found = false;
                for (const auto& d : r.named)
                    if (d.name == it.role.name) {
                        os << (d.parent_head_index >= 0 ? binder_of(r, d.parent_head_index)
                                                        : d.parent_name)
                           << '.' << d.name;
                        found = true;
                    }
                if (!found) os << it.role.name;
            } else {
                os << role_str(r, it.role);
            }
            os << ']';
        }
        os << " ; layer:";
        if (r.chain.empty()) {
            os << " id";
        } else {
            for (std::size_t k = 0; k < r.chain.size(); ++k) {
                const layer_fn& fn = r.chain[k];
                os << (k ? ", " : " ");
                switch (fn.kind) {
                    case layer_fn_kind::append:
                        os << "app(" << target_str(r, fn.target, declared) << ", \""
                           << payload_str(fn.payload) << "\")";
                        break;
                    case layer_fn_kind::insert:
                        os << "ins(" << target_str(r, fn.target, declared) << ", \""
                           << payload_str(fn.payload) << "\")";
                        break;
                    case layer_fn_kind::erase:
                        os << "del(" << target_str(r, fn.target, declared) << ")";
                        break;
                    case layer_fn_kind::copy:
                        os << "copy(" << target_str(r, fn.target, declared) << ")";
                        break;
                }
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace mlpg
