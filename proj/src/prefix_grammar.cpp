#include "mlpg/prefix_grammar.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlpg {

bool is_alphabetic(const prefix_grammar& g) {
    return std::all_of(g.rules.begin(), g.rules.end(),
                       [](const prefix_rule& r) { return r.lhs.size() == 1; });
}

std::vector<std::string> plain_syms(const plain_word& w) {
    std::vector<std::string> out;
    out.reserve(w.size());
    for (const auto& l : w) out.push_back(l.sym);
    return out;
}

std::string to_string(const plain_word& w) { return plain_str(plain_syms(w)); }

plain_word make_plain_word(const std::vector<std::string>& syms, uid_source& uids) {
    plain_word w;
    w.reserve(syms.size());
    for (const auto& s : syms) w.push_back({s, uids.fresh()});
    return w;
}

static bool lhs_matches(const prefix_rule& r, const plain_word& w) {
    if (r.lhs.empty() || r.lhs.size() > w.size()) return false;
    for (std::size_t k = 0; k < r.lhs.size(); ++k)
        if (w[k].sym != r.lhs[k]) return false;
    return true;
}

std::optional<std::size_t> first_applicable(const prefix_grammar& g, const plain_word& w) {
    for (std::size_t r = 0; r < g.rules.size(); ++r)
        if (lhs_matches(g.rules[r], w)) return r;
    return std::nullopt;
}

plain_word pg_apply(const prefix_grammar& g, std::size_t r, const plain_word& w,
                    uid_source& uids, plain_step& log) {
    const prefix_rule& rule = g.rules.at(r);
    if (!lhs_matches(rule, w)) throw std::runtime_error("pg_apply: lhs does not match");
    log.rule_index = r;
    log.consumed.clear();
    log.produced.clear();
    plain_word out;
    out.reserve(rule.rhs.size() + w.size() - rule.lhs.size());
    for (std::size_t k = 0; k < rule.lhs.size(); ++k) log.consumed.push_back(w[k].uid);
    for (const auto& s : rule.rhs) {
        out.push_back({s, uids.fresh()});
        log.produced.push_back(out.back().uid);
    }
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(rule.lhs.size()), w.end());
    return out;
}

plain_trace pg_run(const prefix_grammar& g, std::size_t max_words) {
    plain_trace tr;
    tr.words.push_back(make_plain_word(g.init, tr.uids));
    while (tr.words.size() < max_words) {
        auto r = first_applicable(g, tr.words.back());
        if (!r) break;
        plain_step st;
        tr.words.push_back(pg_apply(g, *r, tr.words.back(), tr.uids, st));
        tr.steps.push_back(st);
    }
    return tr;
}

pg_tree pg_run_all(const prefix_grammar& g, std::size_t max_depth, std::size_t max_nodes) {
    pg_tree t;
    uid_source uids;
    t.nodes.push_back({make_plain_word(g.init, uids), std::nullopt, 0, {}});
    for (std::size_t n = 0; n < t.nodes.size() && t.nodes.size() < max_nodes; ++n) {
        if (t.nodes[n].depth >= max_depth) continue;
        for (std::size_t r = 0; r < g.rules.size(); ++r) {
            if (!lhs_matches(g.rules[r], t.nodes[n].word)) continue;
            if (t.nodes.size() >= max_nodes) break;
            plain_step st;
            plain_word child = pg_apply(g, r, t.nodes[n].word, uids, st);
            t.nodes[n].children.push_back(t.nodes.size());
            t.nodes.push_back({std::move(child), r, t.nodes[n].depth + 1, {}});
        }
    }
    return t;
}

bool changed_in_segment(const plain_trace& tr, occ_uid uid, std::size_t i, std::size_t j) {
    for (std::size_t k = i; k < j && k < tr.steps.size(); ++k)
        for (occ_uid c : tr.steps[k].consumed)
            if (c == uid) return true;
    return false;
}

std::optional<plain_turchin_verdict> turchin_pair_plain(const plain_trace& tr,
                                                        std::size_t i, std::size_t j) {
    if (i >= j || j >= tr.words.size()) return std::nullopt;
    const plain_word& wi = tr.words[i];
    const plain_word& wj = tr.words[j];
    if (wj.size() < wi.size()) return std::nullopt;
    // Maximal untouched literal uid-suffix of words[i] that words[j] retains.
    std::size_t lmax = 0;
    while (lmax < wi.size()) {
        const plain_letter& cand = wi[wi.size() - 1 - lmax];
        if (changed_in_segment(tr, cand.uid, i, j)) break;
        if (wj[wj.size() - 1 - lmax].uid != cand.uid) break;
        ++lmax;
    }
    for (std::size_t l = lmax + 1; l-- > 0;) {
        std::size_t phi = wi.size() - l;
        bool eq = true;
        for (std::size_t k = 0; k < phi && eq; ++k) eq = wi[k].sym == wj[k].sym;
        if (!eq) continue;
        plain_turchin_verdict v;
        v.i = i;
        v.j = j;
        for (std::size_t k = 0; k < phi; ++k) v.top.push_back(wi[k].sym);
        for (std::size_t k = phi; k < wj.size() - l; ++k) v.mid.push_back(wj[k].sym);
        for (std::size_t k = phi; k < wi.size(); ++k) v.theta.push_back(wi[k].sym);
        return v;
    }
    return std::nullopt;
}

std::optional<plain_turchin_verdict> find_first_pair_plain(const plain_trace& tr) {
    for (std::size_t j = 1; j < tr.words.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (auto v = turchin_pair_plain(tr, i, j)) return v;
    return std::nullopt;
}

static std::string strip(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

static std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

prefix_grammar parse_pg(const std::string& text) {
    prefix_grammar g;
    std::istringstream is(text);
    std::string line;
    bool saw_init = false;
    while (std::getline(is, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.rfind("init:", 0) == 0) {
            g.init = split_ws(line.substr(5));
            saw_init = true;
            continue;
        }
        std::size_t arrow = line.find("->");
        if (arrow == std::string::npos)
            throw std::runtime_error("parse_pg: expected '->' in rule: " + line);
        std::string rhs_part = line.substr(arrow + 2);
        if (!rhs_part.empty() && strip(rhs_part).back() == ';') {
            rhs_part = strip(rhs_part);
            rhs_part.pop_back();
        }
        prefix_rule r;
        r.lhs = split_ws(line.substr(0, arrow));
        r.rhs = split_ws(rhs_part);
        if (r.lhs.empty()) throw std::runtime_error("parse_pg: empty lhs: " + line);
        g.rules.push_back(std::move(r));
    }
    if (!saw_init) throw std::runtime_error("parse_pg: missing 'init:' line");
    return g;
}

prefix_grammar load_pg_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_pg(buf.str());
}

std::string to_string(const prefix_grammar& g) {
    std::ostringstream os;
    for (const auto& r : g.rules) {
        for (std::size_t k = 0; k < r.lhs.size(); ++k) os << (k ? " " : "") << r.lhs[k];
        os << " ->";
        for (const auto& s : r.rhs) os << ' ' << s;
        os << ";\n";
    }
    os << "init:";
    for (const auto& s : g.init) os << ' ' << s;
    os << '\n';
    return os.str();
}

}  // namespace mlpg
