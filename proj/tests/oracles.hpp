#pragma once

// Reference implementations used only by tests.  Each restates its definition
// directly and shares no helpers with the library code it checks.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mlpg/labels.hpp"
#include "mlpg/mlpg.hpp"
#include "mlpg/prefix_grammar.hpp"
#include "mlpg/random_grammar.hpp"
#include "mlpg/whistles.hpp"

namespace oracle {

using namespace mlpg;

// ---- labels: strict ancestry recomputed by walking parent pointers ----

inline bool precedes_by_parent_walk(const label_registry& reg, label_id a, label_id b) {
    for (std::optional<label_id> p = reg.parent(b); p; p = reg.parent(*p))
        if (*p == a) return true;
    return false;
}

// ---- plain Turchin pair, clause by clause ----

struct plain_oracle_verdict {
    std::size_t i = 0, j = 0, theta_len = 0;
};

inline bool plain_clauses(const plain_trace& tr, std::size_t i, std::size_t j,
                          std::size_t l) {
    const plain_word& wi = tr.words[i];
    const plain_word& wj = tr.words[j];
    if (wj.size() < wi.size() || l > wi.size()) return false;
    // Theta: the same occurrences end both words.
    for (std::size_t k = 0; k < l; ++k)
        if (wi[wi.size() - l + k].uid != wj[wj.size() - l + k].uid) return false;
    // Untouched: no step of [i,j) consumed a Theta occurrence.
    for (std::size_t s = i; s < j; ++s)
        for (std::size_t k = 0; k < l; ++k) {
            const auto& c = tr.steps[s].consumed;
            if (std::find(c.begin(), c.end(), wi[wi.size() - l + k].uid) != c.end())
                return false;
        }
    // The Phi prefixes agree letterwise as plain symbols.
    for (std::size_t k = 0; k + l < wi.size(); ++k)
        if (wi[k].sym != wj[k].sym) return false;
    return true;
}

inline std::optional<plain_oracle_verdict> plain_turchin_oracle(const plain_trace& tr,
                                                                std::size_t i,
                                                                std::size_t j) {
    for (std::size_t l = tr.words[i].size() + 1; l-- > 0;)
        if (plain_clauses(tr, i, j, l)) return plain_oracle_verdict{i, j, l};
    return std::nullopt;
}

// ---- layered Turchin pair, clause by clause ----

inline bool mlpg_clauses(const whistle_trace& tr, std::size_t i, std::size_t j,
                         std::size_t l) {
    const auto& wi = tr.words[i].visible.letters;
    const auto& wj = tr.words[j].visible.letters;
    if (l > wi.size() || wj.size() < wi.size()) return false;
    std::vector<occ_uid> theta;
    for (std::size_t k = wi.size() - l; k < wi.size(); ++k) theta.push_back(wi[k].uid);
    // (a) no Theta occurrence is consumed during [i,j)
    for (std::size_t s = i; s < j; ++s)
        for (occ_uid u : theta)
            if (tr.consumed[s].count(u)) return false;
    // (b) every word of [i..j] ends with the Theta occurrences, keeping them
    //     in the visible layer throughout
    for (std::size_t k = i; k <= j; ++k) {
        const auto& wk = tr.words[k].visible.letters;
        if (wk.size() < l) return false;
        for (std::size_t t = 0; t < l; ++t)
            if (wk[wk.size() - l + t].uid != theta[t]) return false;
    }
    // (c) interior words keep at least one full head pattern ahead of Theta
    for (std::size_t k = i; k < j; ++k)
        if (tr.words[k].visible.size() < l + tr.max_head_len) return false;
    // (d) the Phi prefixes agree as plain symbols
    for (std::size_t t = 0; t + l < wi.size(); ++t)
        if (wi[t].sym != wj[t].sym) return false;
    return true;
}

inline std::optional<std::size_t> mlpg_turchin_oracle(const whistle_trace& tr,
                                                      std::size_t i, std::size_t j) {
    for (std::size_t l = tr.words[i].visible.size() + 1; l-- > 0;)
        if (mlpg_clauses(tr, i, j, l)) return l;
    return std::nullopt;
}

// ---- homeomorphic embedding: the bare three-rule recursion ----

inline bool hve_oracle(const term_ptr& a, const term_ptr& b) {
    if (a->kind == term_kind::var && b->kind == term_kind::var) return true;
    if (b->kind != term_kind::var)
        for (const auto& arg : b->args)
            if (hve_oracle(a, arg)) return true;
    if (a->kind != term_kind::var && a->kind == b->kind && a->name == b->name &&
        a->args.size() == b->args.size()) {
        bool all = true;
        for (std::size_t k = 0; all && k < a->args.size(); ++k)
            all = hve_oracle(a->args[k], b->args[k]);
        if (all) return true;
    }
    return false;
}

// ---- random terms ----

inline term_ptr random_ground_term(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> d3(0, 2);
    if (depth <= 0) return mk_ctor("Z");
    switch (d3(rng)) {
    case 0: return mk_ctor("Z");
    case 1: return mk_ctor("S", {random_ground_term(rng, depth - 1)});
    default:
        return mk_ctor("P", {random_ground_term(rng, depth - 1),
                             random_ground_term(rng, depth - 1)});
    }
}

inline term_ptr random_term(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> d5(0, 4);
    static const std::vector<std::string> vars{"x", "y1", "z2"};
    if (depth <= 0) {
        int k = d5(rng);
        return k < 3 ? mk_var(vars[static_cast<std::size_t>(k) % vars.size()])
                     : mk_ctor("Z");
    }
    switch (d5(rng)) {
    case 0: return mk_var(vars[static_cast<std::size_t>(d5(rng)) % vars.size()]);
    case 1: return mk_ctor("Z");
    case 2: return mk_ctor("S", {random_term(rng, depth - 1)});
    case 3: return mk_call("f", {random_term(rng, depth - 1)});
    default:
        return mk_ctor("P", {random_term(rng, depth - 1), random_term(rng, depth - 1)});
    }
}

// Puts t one level deeper inside a random context, so t embeds into the result.
inline term_ptr wrap_term(std::mt19937& rng, const term_ptr& t) {
    switch (std::uniform_int_distribution<int>(0, 2)(rng)) {
    case 0: return mk_ctor("S", {t});
    case 1: return mk_ctor("P", {t, random_term(rng, 1)});
    default: return mk_call("f", {t});
    }
}

// ---- proposition checks over grammar sessions ----

// Behind any visible letter only equal or ancestor labels appear.
inline bool prop_labels_monotone(const label_registry& reg, const gword& w) {
    const auto& ls = w.visible.letters;
    for (std::size_t i = 0; i < ls.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (ls[i].label != ls[j].label && !reg.precedes(ls[i].label, ls[j].label))
                return false;
    return true;
}

// Birth labels of the invisible-born ancestors of every occurrence.  Parents
// always carry smaller uids, so one pass in key order closes the relation.
inline std::map<occ_uid, std::set<label_id>> invisible_origins(const trace_session& s) {
    std::map<occ_uid, std::set<label_id>> out;
    for (const auto& [u, lbl] : s.birth_label) {
        std::set<label_id>& o = out[u];
        auto pit = s.parents.find(u);
        if (pit != s.parents.end())
            for (occ_uid p : pit->second) {
                auto po = out.find(p);
                if (po != out.end()) o.insert(po->second.begin(), po->second.end());
            }
        if (s.born_invisible.count(u)) o.insert(lbl);
    }
    return out;
}

// Derivatives of incomparably-labelled invisible letters never share a
// visible layer.
inline bool prop_incomparable_origins_separated(const label_registry& reg,
                                                const trace_session& s) {
    auto orig = invisible_origins(s);
    for (const auto& w : s.words) {
        const auto& ls = w.visible.letters;
        for (std::size_t i = 0; i < ls.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                for (label_id a : orig[ls[i].uid])
                    for (label_id b : orig[ls[j].uid])
                        if (a != b && !reg.precedes(a, b) && !reg.precedes(b, a))
                            return false;
    }
    return true;
}

inline std::map<occ_uid, std::set<occ_uid>> ancestor_closure(const trace_session& s) {
    std::map<occ_uid, std::set<occ_uid>> anc;
    for (const auto& [u, ps] : s.parents)
        for (occ_uid p : ps) {
            anc[u].insert(p);
            auto it = anc.find(p);
            if (it != anc.end() && it->first != u)
                anc[u].insert(it->second.begin(), it->second.end());
        }
    return anc;
}

// For x before y in some word, no later word puts a derivative of y
// strictly before a derivative of x.
inline bool prop_derivative_order(const trace_session& s) {
    auto anc = ancestor_closure(s);
    auto derives_from = [&](occ_uid d, occ_uid src) {
        if (d == src) return true;
        auto it = anc.find(d);
        return it != anc.end() && it->second.count(src) > 0;
    };
    for (std::size_t t = 0; t < s.words.size(); ++t) {
        const auto& wt = s.words[t].visible.letters;
        for (std::size_t u = t + 1; u < s.words.size(); ++u) {
            const auto& wu = s.words[u].visible.letters;
            // earliest and latest derivative position per source letter
            std::vector<long> lo(wt.size(), -1), hi(wt.size(), -1);
            for (std::size_t k = 0; k < wu.size(); ++k)
                for (std::size_t m = 0; m < wt.size(); ++m)
                    if (derives_from(wu[k].uid, wt[m].uid)) {
                        if (lo[m] < 0) lo[m] = static_cast<long>(k);
                        hi[m] = static_cast<long>(k);
                    }
            for (std::size_t yi = 0; yi < wt.size(); ++yi)
                for (std::size_t xi = 0; xi < yi; ++xi)
                    if (lo[yi] >= 0 && hi[xi] >= 0 && lo[yi] < hi[xi]) return false;
        }
    }
    return true;
}

// ---- scaled property runners shared by unit and acceptance suites ----

struct prop_stats {
    std::size_t words = 0, grammars = 0, v_monotone = 0, v_separated = 0, v_ordered = 0;
};

inline prop_stats prop_suite(std::size_t min_words, unsigned seed) {
    prop_stats st;
    std::mt19937 rng(seed);
    while (st.words < min_words) {
        mlpg_grammar g = random_alphabetic_mlpg(rng);
        trace_session s = make_session(g);
        run_ordered(g, s, 20);
        ++st.grammars;
        st.words += s.words.size();
        for (const auto& w : s.words)
            if (!prop_labels_monotone(s.state.reg, w)) ++st.v_monotone;
        if (!prop_incomparable_origins_separated(s.state.reg, s)) ++st.v_separated;
        if (!prop_derivative_order(s)) ++st.v_ordered;
    }
    return st;
}

struct agree_stats {
    std::size_t traces = 0, pairs = 0, disagreements = 0;
};

inline agree_stats plain_agreement(std::size_t n_traces, unsigned seed) {
    agree_stats st;
    std::mt19937 rng(seed);
    while (st.traces < n_traces) {
        prefix_grammar g = random_plain_pg(rng);
        plain_trace tr = pg_run(g, 10 + st.traces % 31);
        if (tr.words.size() < 2) continue;
        ++st.traces;
        for (std::size_t j = 1; j < tr.words.size(); ++j)
            for (std::size_t i = 0; i < j; ++i) {
                ++st.pairs;
                auto got = turchin_pair_plain(tr, i, j);
                auto want = plain_turchin_oracle(tr, i, j);
                bool same = got.has_value() == want.has_value() &&
                            (!got || got->theta.size() == want->theta_len);
                if (!same) ++st.disagreements;
            }
    }
    return st;
}

inline agree_stats mlpg_agreement(std::size_t n_traces, unsigned seed) {
    agree_stats st;
    std::mt19937 rng(seed);
    while (st.traces < n_traces) {
        mlpg_grammar g = random_alphabetic_mlpg(rng);
        trace_session s = make_session(g);
        run_ordered(g, s, 8 + st.traces % 9);
        whistle_trace tr = make_whistle_trace(s, max_head_len(g));
        if (tr.words.size() < 2) continue;
        ++st.traces;
        for (std::size_t j = 1; j < tr.words.size(); ++j)
            for (std::size_t i = 0; i < j; ++i) {
                ++st.pairs;
                auto got = turchin_pair(tr, i, j);
                auto want = mlpg_turchin_oracle(tr, i, j);
                bool same = got.has_value() == want.has_value() &&
                            (!got || got->theta_len == *want);
                if (!same) ++st.disagreements;
            }
    }
    return st;
}

struct totality_stats {
    std::size_t qualifying = 0, excluded = 0, without_pair = 0;
};

inline totality_stats whistle_totality(std::size_t want_qualifying, unsigned seed,
                         std::size_t max_attempts = 2000) {
    totality_stats st;
    std::mt19937 rng(seed);
    for (std::size_t a = 0; a < max_attempts && st.qualifying < want_qualifying; ++a) {
        mlpg_grammar g = random_alphabetic_mlpg(rng);
        trace_session s = make_session(g);
        run_ordered(g, s, 300);
        if (s.words.size() < 300) {
            ++st.excluded;
            continue;
        }
        ++st.qualifying;
        whistle_trace full = make_whistle_trace(s, max_head_len(g));
        whistle_trace head = full;  // cheap scan of a short prefix first
        if (head.words.size() > 60) {
            head.words.resize(60);
            head.consumed.resize(59);
        }
        if (!find_first_pair(head) && !find_first_pair(full)) ++st.without_pair;
    }
    return st;
}

// Indices of the trace pairwise related by the Turchin relation, collected
// greedily from the left.
inline std::vector<std::size_t> greedy_pairwise_chain(const plain_trace& tr) {
    std::vector<std::size_t> chain;
    for (std::size_t j = 0; j < tr.words.size(); ++j) {
        bool all = true;
        for (std::size_t i : chain)
            if (!turchin_pair_plain(tr, i, j)) {
                all = false;
                break;
            }
        if (all) chain.push_back(j);
    }
    return chain;
}

struct hve_stats {
    std::size_t checked = 0, violations = 0;
};

inline hve_stats hve_reflexivity(std::size_t n, unsigned seed) {
    hve_stats st;
    std::mt19937 rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        term_ptr t = random_ground_term(rng, 5);
        ++st.checked;
        if (!hve(t, t)) ++st.violations;
    }
    return st;
}

inline hve_stats hve_transitivity(std::size_t n, unsigned seed) {
    hve_stats st;
    std::mt19937 rng(seed);
    while (st.checked < n) {
        term_ptr t1 = random_term(rng, 2);
        term_ptr t2 = wrap_term(rng, t1);
        term_ptr t3 = wrap_term(rng, wrap_term(rng, t2));
        if (!hve(t1, t2) || !hve(t2, t3)) continue;
        ++st.checked;
        if (!hve(t1, t3)) ++st.violations;
    }
    return st;
}

inline hve_stats hve_agreement(std::size_t n, unsigned seed) {
    hve_stats st;
    std::mt19937 rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
        term_ptr a = random_term(rng, 4);
        term_ptr b = random_term(rng, 4);
        ++st.checked;
        if (hve(a, b) != hve_oracle(a, b)) ++st.violations;
    }
    return st;
}

}  // namespace oracle
