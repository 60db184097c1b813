#include "mlpg/constructions.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace mlpg {

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

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) out += ' ';
        out += parts[k];
    }
    return out;
}

}  // namespace

// ---- Turing machines ----

turing_machine parse_tm(const std::string& text) {
    turing_machine tm;
    bool saw_blank = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.rfind("states:", 0) == 0) {
            tm.states = split_ws(line.substr(7));
        } else if (line.rfind("tape:", 0) == 0) {
            tm.tape_alphabet = split_ws(line.substr(5));
        } else if (line.rfind("start:", 0) == 0) {
            tm.start = strip(line.substr(6));
        } else if (line.rfind("final:", 0) == 0) {
            for (const auto& q : split_ws(line.substr(6))) tm.finals.insert(q);
        } else if (line.rfind("blank:", 0) == 0) {
            tm.blank = strip(line.substr(6));
            saw_blank = true;
        } else if (line.rfind("input:", 0) == 0) {
            tm.input = strip(line.substr(6));
        } else if (line.rfind("delta:", 0) == 0) {
            std::vector<std::string> toks = split_ws(line.substr(6));
            if (toks.size() != 6 || toks[2] != "->" || (toks[5] != "L" && toks[5] != "R"))
                throw std::runtime_error("bad transition line: " + line);
            tm.delta.push_back({toks[0], toks[1], toks[3], toks[4], toks[5][0]});
        } else {
            throw std::runtime_error("unrecognized machine line: " + line);
        }
    }
    if (tm.states.empty()) throw std::runtime_error("machine needs a states: line");
    if (tm.tape_alphabet.empty()) throw std::runtime_error("machine needs a tape: line");
    if (!saw_blank) tm.blank = "_";

    std::set<std::string> qs(tm.states.begin(), tm.states.end());
    std::set<std::string> as(tm.tape_alphabet.begin(), tm.tape_alphabet.end());
    if (!qs.count(tm.start)) throw std::runtime_error("start state is not declared");
    if (!as.count(tm.blank)) throw std::runtime_error("blank symbol is not in the tape alphabet");
    for (const auto& f : tm.finals)
        if (!qs.count(f)) throw std::runtime_error("final state is not declared: " + f);
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& d : tm.delta) {
        if (!qs.count(d.q) || !qs.count(d.q2))
            throw std::runtime_error("transition uses an undeclared state");
        if (!as.count(d.a) || !as.count(d.a2))
            throw std::runtime_error("transition uses an undeclared tape symbol");
        if (!keys.insert({d.q, d.a}).second)
            throw std::runtime_error("nondeterministic transitions for " + d.q + " " + d.a);
    }
    for (const auto& q : tm.states)
        if (as.count(q + "^R") || as.count(q + "^L"))
            throw std::runtime_error("tape symbol collides with a state marker");
    if (as.count("Blank^L") || as.count("Blank^R"))
        throw std::runtime_error("tape symbol collides with a frontier marker");
    for (char ch : tm.input)
        if (!as.count(std::string(1, ch)))
            throw std::runtime_error(std::string("input symbol not in the tape alphabet: ") + ch);
    return tm;
}

turing_machine load_tm_file(const std::string& path) { return parse_tm(read_file(path)); }

tm_config tm_init(const turing_machine& tm, const std::string& input) {
    tm_config c;
    c.state = tm.start;
    for (std::size_t k = 0; k < input.size(); ++k)
        c.tape[static_cast<long>(k)] = std::string(1, input[k]);
    return c;
}

bool tm_step(const turing_machine& tm, tm_config& c) {
    if (c.halted) return false;
    if (tm.finals.count(c.state)) {
        c.halted = true;
        return false;
    }
    auto it = c.tape.find(c.head);
    std::string a = it == c.tape.end() ? tm.blank : it->second;
    for (const auto& d : tm.delta) {
        if (d.q != c.state || d.a != a) continue;
        c.tape[c.head] = d.a2;
        c.head += d.dir == 'R' ? 1 : -1;
        c.state = d.q2;
        return true;
    }
    c.halted = true;
    return false;
}

bool operator==(const tape_snapshot& a, const tape_snapshot& b) {
    return a.left == b.left && a.cell == b.cell && a.right == b.right && a.state == b.state;
}

std::string to_string(const tape_snapshot& s) {
    std::string out = join(s.left);
    out += out.empty() ? "(" : " (";
    out += s.state + " " + s.cell + ")";
    if (!s.right.empty()) out += " " + join(s.right);
    return out;
}

static void trim_snapshot(tape_snapshot& s, const std::string& blank) {
    while (!s.left.empty() && s.left.front() == blank) s.left.erase(s.left.begin());
    while (!s.right.empty() && s.right.back() == blank) s.right.pop_back();
}

tape_snapshot snapshot(const turing_machine& tm, const tm_config& c) {
    tape_snapshot s;
    s.state = c.state;
    auto at = [&](long i) {
        auto it = c.tape.find(i);
        return it == c.tape.end() ? tm.blank : it->second;
    };
    long lo = c.head, hi = c.head;
    if (!c.tape.empty()) {
        lo = std::min(lo, c.tape.begin()->first);
        hi = std::max(hi, c.tape.rbegin()->first);
    }
    for (long i = lo; i < c.head; ++i) s.left.push_back(at(i));
    s.cell = at(c.head);
    for (long i = c.head + 1; i <= hi; ++i) s.right.push_back(at(i));
    trim_snapshot(s, tm.blank);
    return s;
}

mlpg_grammar tm_to_mlpg(const turing_machine& tm, const std::string& input) {
    mlpg_grammar g;
    g.k1 = 2;
    g.k2 = 1;
    g.alphabet = tm.tape_alphabet;
    for (const auto& q : tm.states) {
        g.alphabet.push_back(q + "^R");
        g.alphabet.push_back(q + "^L");
    }
    g.alphabet.push_back("Blank^L");
    g.alphabet.push_back("Blank^R");

    g.init_visible.push_back({tm.start + "^R", "0"});
    for (char ch : input) g.init_visible.push_back({std::string(1, ch), "0"});
    g.init_visible.push_back({"Blank^R", "0"});
    g.init_invisible.push_back({"Blank^L", "0.1"});

    auto push_letter = [](const std::string& a2) {
        layer_fn fn;
        fn.kind = layer_fn_kind::insert;
        fn.target = child_target::in_word();
        fn.payload = {a2};
        return fn;
    };

    for (std::size_t k = 0; k < tm.delta.size(); ++k) {
        const tm_rule& d = tm.delta[k];
        bool halt = tm.finals.count(d.q2) > 0;
        const std::string base = "t" + std::to_string(k);
        const std::string rm = d.q + "^R", lm = d.q + "^L";
        const std::string rm2 = d.q2 + "^R", lm2 = d.q2 + "^L";

        // marker left of the cell
        {
            mlpg_rule r;
            r.name = base + "r";
            r.halting = halt;
            r.head = {head_item{true, rm, "", "h1"}, head_item{true, d.a, "", "h2"}};
            r.anchor = 1;
            if (d.dir == 'R') {
                r.repl = {repl_item{-1, rm2, label_role::of_head(1)}};
                r.chain.push_back(push_letter(d.a2));
            } else {
                r.kind = rule_kind::pop;
                r.repl = {repl_item{-1, lm2, label_role::of_head(1)},
                          repl_item{-1, d.a2, label_role::of_head(1)}};
            }
            g.rules.push_back(std::move(r));
        }
        // marker right of the cell
        {
            mlpg_rule r;
            r.name = base + "l";
            r.halting = halt;
            r.head = {head_item{true, d.a, "", "h1"}, head_item{true, lm, "", "h2"}};
            r.anchor = 0;
            if (d.dir == 'R') {
                r.repl = {repl_item{-1, rm2, label_role::of_head(0)}};
                r.chain.push_back(push_letter(d.a2));
            } else {
                r.kind = rule_kind::pop;
                r.repl = {repl_item{-1, lm2, label_role::of_head(0)},
                          repl_item{-1, d.a2, label_role::of_head(0)}};
            }
            g.rules.push_back(std::move(r));
        }
        if (d.a != tm.blank) continue;

        // the head reads the right frontier marker as a blank
        {
            mlpg_rule r;
            r.name = base + "rf";
            r.halting = halt;
            r.head = {head_item{true, rm, "", "h1"}, head_item{true, "Blank^R", "", "h2"}};
            r.anchor = 1;
            if (d.dir == 'R') {
                r.repl = {repl_item{-1, rm2, label_role::of_head(1)},
                          repl_item{-1, "Blank^R", label_role::of_head(1)}};
                r.chain.push_back(push_letter(d.a2));
            } else {
                r.kind = rule_kind::pop;
                r.repl = {repl_item{-1, lm2, label_role::of_head(1)},
                          repl_item{-1, d.a2, label_role::of_head(1)},
                          repl_item{-1, "Blank^R", label_role::of_head(1)}};
            }
            g.rules.push_back(std::move(r));
        }
        // the popped left frontier marker is the head cell; the chain below
        // it is empty, so left moves rematerialize a deeper marker instead of
        // popping and right moves rebuild the marker before pushing
        {
            mlpg_rule r;
            r.name = base + "lf";
            r.halting = halt;
            r.head = {head_item{true, "Blank^L", "", "h1"}, head_item{true, lm, "", "h2"}};
            r.anchor = 0;
            r.named = {named_decl{"rho", 0, ""}};
            if (d.dir == 'R') {
                r.repl = {repl_item{-1, rm2, label_role::of_head(0)}};
                layer_fn app;
                app.kind = layer_fn_kind::append;
                app.target = child_target::named_l("rho");
                app.payload = {"Blank^L"};
                layer_fn ins;
                ins.kind = layer_fn_kind::insert;
                ins.target = child_target::named_l("rho");
                ins.payload = {d.a2};
                r.chain = {app, ins};
            } else {
                r.repl = {repl_item{-1, "Blank^L", label_role::named_l("rho")},
                          repl_item{-1, lm2, label_role::of_head(0)},
                          repl_item{-1, d.a2, label_role::of_head(0)}};
            }
            g.rules.push_back(std::move(r));
        }
    }
    return g;
}

std::optional<tape_snapshot> reconstruct_tape(const turing_machine& tm,
                                              const label_registry& reg, const gword& w) {
    std::set<std::string> rstates, lstates;
    for (const auto& q : tm.states) {
        rstates.insert(q + "^R");
        lstates.insert(q + "^L");
    }
    auto is_marker = [&](const std::string& sym) {
        return rstates.count(sym) || lstates.count(sym) || sym == "Blank^L" || sym == "Blank^R";
    };
    auto cell_of = [&](const std::string& sym) {
        return sym == "Blank^L" || sym == "Blank^R" ? tm.blank : sym;
    };

    const auto& v = w.visible.letters;
    if (v.size() < 2 || v.back().sym != "Blank^R") return std::nullopt;
    tape_snapshot s;
    std::string cell_sym;
    if (rstates.count(v[0].sym)) {
        s.state = v[0].sym.substr(0, v[0].sym.size() - 2);
        cell_sym = v[1].sym;
    } else if (v.size() >= 3 && lstates.count(v[1].sym)) {
        cell_sym = v[0].sym;
        s.state = v[1].sym.substr(0, v[1].sym.size() - 2);
        if (rstates.count(cell_sym) || lstates.count(cell_sym) || cell_sym == "Blank^R")
            return std::nullopt;
    } else {
        return std::nullopt;
    }
    s.cell = cell_of(cell_sym);
    for (std::size_t k = 2; k + 1 < v.size(); ++k) {
        if (is_marker(v[k].sym)) return std::nullopt;
        s.right.push_back(v[k].sym);
    }

    // left of the head: the invisible chain, deepest label first
    std::vector<lletter> inv(w.invisible.letters.begin(), w.invisible.letters.end());
    for (std::size_t a = 0; a < inv.size(); ++a)
        for (std::size_t b = a + 1; b < inv.size(); ++b)
            if (inv[a].label != inv[b].label && !reg.precedes(inv[a].label, inv[b].label) &&
                !reg.precedes(inv[b].label, inv[a].label))
                return std::nullopt;  // not a chain
    std::sort(inv.begin(), inv.end(), [&](const lletter& a, const lletter& b) {
        return reg.precedes(b.label, a.label);
    });
    for (const auto& l : inv) {
        if (is_marker(l.sym) && l.sym != "Blank^L") return std::nullopt;
        s.left.push_back(cell_of(l.sym));
    }

    trim_snapshot(s, tm.blank);
    return s;
}

bisim_report bisimulate(const turing_machine& tm, const std::string& input,
                        std::size_t steps) {
    bisim_report rep;
    mlpg_grammar g = tm_to_mlpg(tm, input);
    trace_session s = make_session(g);
    tm_config c = tm_init(tm, input);

    auto check = [&](std::size_t k) {
        auto got = reconstruct_tape(tm, s.state.reg, s.words.back());
        tape_snapshot want = snapshot(tm, c);
        if (!got) {
            rep.agreed = false;
            rep.detail = "step " + std::to_string(k) + ": grammar word is not a configuration";
            return false;
        }
        if (!(*got == want)) {
            rep.agreed = false;
            rep.detail = "step " + std::to_string(k) + ": " + to_string(*got) +
                         " != " + to_string(want);
            return false;
        }
        return true;
    };

    if (!check(0)) return rep;
    for (std::size_t k = 1; k <= steps; ++k) {
        std::size_t before = s.words.size();
        if (!s.halted && !s.stuck) run_ordered(g, s, before + 1);
        bool grammar_stepped = s.words.size() > before;
        bool machine_stepped = tm_step(tm, c);
        if (grammar_stepped != machine_stepped) {
            rep.agreed = false;
            rep.detail = "step " + std::to_string(k) + ": only one side could move";
            return rep;
        }
        if (!grammar_stepped) {
            rep.both_halted = true;
            return rep;
        }
        if (!check(k)) return rep;
        rep.steps_checked = k;
    }
    return rep;
}

// ---- CFGs in Greibach normal form ----

cfg parse_cfg(const std::string& text) {
    struct raw_prod {
        std::string lhs;
        std::vector<std::string> rhs;
    };
    std::vector<raw_prod> raws;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        std::size_t arrow = line.find("->");
        if (arrow == std::string::npos) throw std::runtime_error("production needs '->': " + line);
        std::vector<std::string> lhs = split_ws(line.substr(0, arrow));
        if (lhs.size() != 1) throw std::runtime_error("production needs one left symbol: " + line);
        raws.push_back({lhs[0], split_ws(line.substr(arrow + 2))});
    }
    if (raws.empty()) throw std::runtime_error("grammar needs at least one production");

    std::set<std::string> nts;
    for (const auto& r : raws) nts.insert(r.lhs);
    cfg g;
    g.start = raws.front().lhs;
    for (const auto& r : raws) {
        cfg_prod p;
        p.lhs = r.lhs;
        if (!r.rhs.empty()) {
            if (nts.count(r.rhs[0]))
                throw std::runtime_error("production must start with a terminal: " + r.lhs);
            p.terminal = r.rhs[0];
            for (std::size_t k = 1; k < r.rhs.size(); ++k) {
                if (!nts.count(r.rhs[k]))
                    throw std::runtime_error("tail symbol is not a nonterminal: " + r.rhs[k]);
                p.tail.push_back(r.rhs[k]);
            }
        }
        g.prods.push_back(std::move(p));
    }
    return g;
}

cfg load_cfg_file(const std::string& path) { return parse_cfg(read_file(path)); }

std::set<std::string> nonterminals(const cfg& g) {
    std::set<std::string> out;
    for (const auto& p : g.prods) out.insert(p.lhs);
    return out;
}

cfg binarize_gnf(const cfg& g) {
    std::set<std::string> used = nonterminals(g);
    std::map<std::string, std::vector<cfg_prod>> prods_by_lhs;
    for (const auto& p : g.prods) prods_by_lhs[p.lhs].push_back(p);

    std::map<std::pair<std::string, std::string>, std::string> pair_names;
    std::vector<std::string> pair_order;

    // A pair nonterminal [x y] derives what x y derives; its productions
    // substitute x's productions in front of y.
    std::function<std::string(const std::string&, const std::string&)> pair_nt =
        [&](const std::string& x, const std::string& y) -> std::string {
        auto key = std::make_pair(x, y);
        auto it = pair_names.find(key);
        if (it != pair_names.end()) return it->second;
        if (pair_names.size() >= 64)
            throw std::runtime_error("binarization grew past the pair cap");
        std::string name = x + "." + y;
        while (used.count(name)) name += "_";
        used.insert(name);
        pair_names.emplace(key, name);
        pair_order.push_back(name);
        std::vector<cfg_prod> ps;
        for (const cfg_prod& xp : prods_by_lhs.at(x)) {
            if (xp.terminal.empty()) {
                for (const cfg_prod& yp : prods_by_lhs.at(y)) {
                    cfg_prod np = yp;
                    np.lhs = name;
                    ps.push_back(std::move(np));
                }
            } else {
                cfg_prod np{name, xp.terminal, xp.tail};
                np.tail.push_back(y);
                ps.push_back(std::move(np));
            }
        }
        prods_by_lhs[name] = std::move(ps);
        return name;
    };

    auto split_tail = [&](std::vector<std::string> tail) {
        while (tail.size() > 2) {
            std::string p = pair_nt(tail[0], tail[1]);
            tail.erase(tail.begin());
            tail[0] = std::move(p);
        }
        return tail;
    };

    cfg out;
    out.start = g.start;
    for (const auto& p : g.prods) {
        cfg_prod np = p;
        np.tail = split_tail(np.tail);
        out.prods.push_back(std::move(np));
    }
    for (std::size_t k = 0; k < pair_order.size(); ++k) {
        for (const cfg_prod& p : prods_by_lhs.at(pair_order[k])) {
            cfg_prod np = p;
            np.tail = split_tail(np.tail);  // may extend pair_order
            out.prods.push_back(std::move(np));
        }
    }

    // pad short tails with a shared erasure nonterminal
    bool need_pad = std::any_of(out.prods.begin(), out.prods.end(), [](const cfg_prod& p) {
        return !p.terminal.empty() && p.tail.size() < 2;
    });
    if (need_pad) {
        std::string pad = "E";
        while (used.count(pad)) pad += "_";
        for (auto& p : out.prods)
            if (!p.terminal.empty())
                while (p.tail.size() < 2) p.tail.push_back(pad);
        out.prods.push_back({pad, "", {}});
    }
    return out;
}

mlpg_grammar cfg_to_mlpg(const cfg& g) {
    std::set<std::string> nts = nonterminals(g);
    std::set<std::string> terms;
    for (const auto& p : g.prods) {
        if (p.terminal.empty()) {
            if (!p.tail.empty())
                throw std::runtime_error("erasure production with a tail: " + p.lhs);
        } else if (p.tail.size() != 2) {
            throw std::runtime_error("production is not in the binary shape: " + p.lhs);
        }
        if (!p.terminal.empty()) terms.insert(p.terminal);
        for (const auto& t : p.tail)
            if (!nts.count(t)) throw std::runtime_error("undefined nonterminal: " + t);
    }

    std::string pop = "Pop";
    while (nts.count(pop) || terms.count(pop)) pop += "_";

    mlpg_grammar m;
    m.k1 = 1;
    m.k2 = 1;
    for (const auto& nt : nts) m.alphabet.push_back(nt);
    for (const auto& t : terms) m.alphabet.push_back(t);
    m.alphabet.push_back(pop);
    m.init_visible = {{g.start, "0"}, {pop, "0"}};

    for (std::size_t k = 0; k < g.prods.size(); ++k) {
        const cfg_prod& p = g.prods[k];
        mlpg_rule r;
        r.name = "p" + std::to_string(k);
        r.head = {head_item{true, p.lhs, "", "h"}};
        if (!p.terminal.empty()) {
            r.repl = {repl_item{-1, p.tail[0], label_role::of_head(0)},
                      repl_item{-1, p.tail[1], label_role::of_head(0)}};
            layer_fn fn;
            fn.kind = layer_fn_kind::append;
            fn.target = child_target::slot_k(1);
            fn.payload = {p.terminal};
            r.chain.push_back(std::move(fn));
        }
        m.rules.push_back(std::move(r));
    }
    mlpg_rule h;
    h.name = "emit";
    h.kind = rule_kind::pop;
    h.halting = true;
    h.head = {head_item{true, pop, "", "h"}};
    m.rules.push_back(std::move(h));
    return m;
}

std::set<std::string> cfg_language(const cfg& g, std::size_t max_len) {
    std::set<std::string> nts = nonterminals(g);
    // words[nt][n] = derivable words of length exactly n; in Greibach form a
    // production's parts are strictly shorter than its own word, so a single
    // pass per length suffices.
    std::map<std::string, std::vector<std::set<std::string>>> words;
    for (const auto& nt : nts) words[nt].assign(max_len + 1, {});
    for (const auto& p : g.prods)
        if (p.terminal.empty()) words[p.lhs][0].insert("");

    std::function<void(const cfg_prod&, std::size_t, std::size_t, const std::string&,
                       std::set<std::string>&)>
        fill = [&](const cfg_prod& p, std::size_t idx, std::size_t rest, const std::string& acc,
                   std::set<std::string>& out) {
            if (idx == p.tail.size()) {
                if (rest == 0) out.insert(acc);
                return;
            }
            const auto& table = words.at(p.tail[idx]);
            for (std::size_t n = 0; n <= rest; ++n)
                for (const auto& w : table[n]) fill(p, idx + 1, rest - n, acc + w, out);
        };

    for (std::size_t n = 1; n <= max_len; ++n) {
        for (const auto& p : g.prods) {
            if (p.terminal.empty()) continue;
            if (p.terminal.size() > n) continue;
            fill(p, 0, n - p.terminal.size(), p.terminal, words[p.lhs][n]);
        }
    }

    std::set<std::string> out;
    for (std::size_t n = 0; n <= max_len; ++n)
        out.insert(words[g.start][n].begin(), words[g.start][n].end());
    return out;
}

cfg random_gnf(std::mt19937& rng) {
    auto pick = [&](int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng);
    };
    std::vector<std::string> nts = {"S", "A", "B", "C"};
    nts.resize(static_cast<std::size_t>(pick(2, 4)));
    std::vector<std::string> terms = {"a", "b", "c"};
    terms.resize(static_cast<std::size_t>(pick(1, 3)));

    cfg g;
    g.start = "S";
    for (const auto& nt : nts) {
        int prods = pick(1, 3);
        for (int k = 0; k < prods; ++k) {
            cfg_prod p;
            p.lhs = nt;
            if (pick(0, 4) > 0) {
                p.terminal = terms[static_cast<std::size_t>(pick(0, static_cast<int>(terms.size()) - 1))];
                int tail = pick(0, 2);
                for (int t = 0; t < tail; ++t)
                    p.tail.push_back(nts[static_cast<std::size_t>(pick(0, static_cast<int>(nts.size()) - 1))]);
            }
            g.prods.push_back(std::move(p));
        }
    }
    return g;
}

// ---- exponential language ----

mlpg_grammar explang_grammar() {
    mlpg_grammar g;
    g.alphabet = {"a", "b"};
    g.k1 = 1;
    g.k2 = 2;
    g.init_visible = {{"a", "0"}};
    g.init_invisible = {{"b", "0.1"}, {"b", "0.1"}};

    mlpg_rule r1;
    r1.name = "r1";
    r1.kind = rule_kind::pop;
    r1.head = {head_item{true, "a", "", "h"}};
    r1.repl = {repl_item{-1, "a", label_role::of_head(0)}};
    g.rules.push_back(std::move(r1));

    mlpg_rule r2;
    r2.name = "r2";
    r2.kind = rule_kind::pop;
    r2.halting = true;
    r2.head = {head_item{true, "a", "", "h"}};
    g.rules.push_back(std::move(r2));

    mlpg_rule r3;
    r3.name = "r3";
    r3.head = {head_item{true, "b", "", "h"}};
    layer_fn fn;
    fn.kind = layer_fn_kind::append;
    fn.target = child_target::slot_k(1);
    fn.payload = {"b", "b"};
    r3.chain.push_back(std::move(fn));
    g.rules.push_back(std::move(r3));
    return g;
}

}  // namespace mlpg
