#include "mlpg/whistles.hpp"

#include <algorithm>
#include <map>

namespace mlpg {

bool uid_visible_throughout(const whistle_trace& tr, occ_uid uid, std::size_t i,
                            std::size_t j) {
    for (std::size_t k = i; k <= j; ++k) {
        const auto& ls = tr.words.at(k).visible.letters;
        bool found = std::any_of(ls.begin(), ls.end(),
                                 [&](const lletter& l) { return l.uid == uid; });
        if (!found) return false;
    }
    return true;
}

static std::vector<occ_uid> suffix_uids(const gword& w, std::size_t len) {
    std::vector<occ_uid> out;
    const auto& ls = w.visible.letters;
    for (std::size_t k = ls.size() - len; k < ls.size(); ++k) out.push_back(ls[k].uid);
    return out;
}

std::size_t stable_suffix_len(const whistle_trace& tr, std::size_t i, std::size_t j) {
    const std::size_t n_i = tr.words.at(i).visible.size();
    std::size_t cap = n_i;
    for (std::size_t k = i; k <= j; ++k)
        cap = std::min(cap, tr.words.at(k).visible.size());
    for (std::size_t k = i; k < j; ++k) {
        std::size_t len = tr.words.at(k).visible.size();
        cap = std::min(cap, len >= tr.max_head_len ? len - tr.max_head_len : 0);
    }
    for (std::size_t l = cap; l > 0; --l) {
        std::vector<occ_uid> suf = suffix_uids(tr.words[i], l);
        bool ok = true;
        for (std::size_t k = i; k <= j && ok; ++k)
            ok = suffix_uids(tr.words[k], l) == suf;
        for (std::size_t k = i; k < j && ok; ++k)
            for (occ_uid u : suf)
                if (tr.consumed.at(k).count(u)) {
                    ok = false;
                    break;
                }
        if (ok) return l;
    }
    return 0;
}

static std::string plain_range(const gword& w, std::size_t b, std::size_t e) {
    std::string out;
    for (std::size_t k = b; k < e; ++k) out += w.visible.letters[k].sym;
    return out;
}

std::optional<turchin_verdict> turchin_pair(const whistle_trace& tr, std::size_t i,
                                            std::size_t j) {
    const gword& wi = tr.words.at(i);
    const gword& wj = tr.words.at(j);
    if (wj.visible.size() < wi.visible.size()) return std::nullopt;
    std::size_t lmax = stable_suffix_len(tr, i, j);
    for (std::size_t l = lmax + 1; l-- > 0;) {
        std::size_t phi = wi.visible.size() - l;
        if (plain_range(wi, 0, phi) != plain_range(wj, 0, phi)) continue;
        turchin_verdict v;
        v.i = i;
        v.j = j;
        v.theta_len = l;
        v.top = plain_range(wi, 0, phi);
        v.mid = plain_range(wj, phi, wj.visible.size() - l);
        v.theta = plain_range(wi, phi, wi.visible.size());
        return v;
    }
    return std::nullopt;
}

std::optional<turchin_verdict> find_first_pair(const whistle_trace& tr) {
    for (std::size_t j = 1; j < tr.words.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (auto v = turchin_pair(tr, i, j)) return v;
    return std::nullopt;
}

std::optional<turchin_verdict> find_first_pair_composite(
    const whistle_trace& tr, const std::vector<term_ptr>& configs) {
    for (std::size_t j = 1; j < tr.words.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (auto v = turchin_pair(tr, i, j))
                if (hve(configs.at(i), configs.at(j))) return v;
    return std::nullopt;
}

whistle_trace make_whistle_trace(const trace_session& s, std::size_t head_len) {
    whistle_trace tr;
    tr.words = s.words;
    tr.max_head_len = head_len;
    for (const auto& st : s.steps)
        tr.consumed.emplace_back(st.consumed.begin(), st.consumed.end());
    return tr;
}

bool hve(const term_ptr& a, const term_ptr& b) {
    if (a->kind == term_kind::var && b->kind == term_kind::var) return true;
    // dive
    if (b->kind != term_kind::var)
        for (const auto& arg : b->args)
            if (hve(a, arg)) return true;
    // couple
    if (a->kind == b->kind && a->kind != term_kind::var && a->name == b->name &&
        a->args.size() == b->args.size()) {
        bool all = true;
        for (std::size_t k = 0; k < a->args.size() && all; ++k)
            all = hve(a->args[k], b->args[k]);
        if (all) return true;
    }
    return false;
}

namespace {

struct msg_builder {
    std::map<std::pair<std::string, std::string>, std::string> cache;
    std::set<std::string> used;
    std::size_t counter = 0;
    subst_map sub1, sub2;

    std::string fresh() {
        for (;;) {
            std::string v = "v" + std::to_string(++counter);
            if (!used.count(v)) return v;
        }
    }

    term_ptr walk(const term_ptr& a, const term_ptr& b) {
        if (term_eq(a, b)) return a;
        if (a->kind == b->kind && a->kind != term_kind::var && a->name == b->name &&
            a->args.size() == b->args.size()) {
            std::vector<term_ptr> args;
            args.reserve(a->args.size());
            for (std::size_t k = 0; k < a->args.size(); ++k)
                args.push_back(walk(a->args[k], b->args[k]));
            return a->kind == term_kind::ctor ? mk_ctor(a->name, std::move(args))
                                              : mk_call(a->name, std::move(args));
        }
        auto key = std::make_pair(term_str(a), term_str(b));
        auto it = cache.find(key);
        if (it == cache.end()) {
            std::string v = fresh();
            it = cache.emplace(key, v).first;
            sub1[v] = a;
            sub2[v] = b;
        }
        return mk_var(it->second);
    }
};

}  // namespace

msg_result msg(const term_ptr& a, const term_ptr& b) {
    msg_builder mb;
    for (const auto& v : free_vars(a)) mb.used.insert(v);
    for (const auto& v : free_vars(b)) mb.used.insert(v);
    msg_result out;
    out.gen = mb.walk(a, b);
    out.sub1 = std::move(mb.sub1);
    out.sub2 = std::move(mb.sub2);
    return out;
}

bool msg_trivial(const msg_result& m) { return m.gen->kind == term_kind::var; }

}  // namespace mlpg
