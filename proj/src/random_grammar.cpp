#include "mlpg/random_grammar.hpp"

#include <algorithm>

namespace mlpg {
namespace {

int pick(std::mt19937& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

mlpg_grammar random_alphabetic_mlpg(std::mt19937& rng) {
    static const std::vector<std::string> pool{"a", "b", "c", "d"};
    mlpg_grammar g;
    int nsym = pick(rng, 2, 4);
    g.alphabet.assign(pool.begin(), pool.begin() + nsym);
    g.k1 = 2;
    g.k2 = 2;
    auto sym = [&] { return g.alphabet[pick(rng, 0, nsym - 1)]; };

    int nvis = pick(rng, 1, 3);
    for (int i = 0; i < nvis; ++i) g.init_visible.push_back({sym(), "0"});
    int ninv = pick(rng, 0, 2);
    for (int i = 0; i < ninv; ++i) g.init_invisible.push_back({sym(), "0.1"});

    int nrules = pick(rng, nsym, nsym + 3);
    for (int r = 0; r < nrules; ++r) {
        mlpg_rule rule;
        rule.name = "r" + std::to_string(r + 1);
        head_item h;
        h.sym = r < nsym ? g.alphabet[r] : sym();
        h.binder = "h";
        rule.head.push_back(h);
        bool popping = pick(rng, 0, 2) == 0;
        rule.kind = popping ? rule_kind::pop : rule_kind::simple;
        if (popping) {
            // Popped letters land below the head label; keeping the
            // replacement at the head label preserves pairwise-comparable
            // visible labels (the popped child is incomparable to siblings).
            int nrepl = pick(rng, 0, 2);
            for (int i = 0; i < nrepl; ++i)
                rule.repl.push_back({-1, sym(), label_role::of_head(0)});
        } else {
            int deep = pick(rng, 0, 2), shallow = pick(rng, 0, 1);
            for (int i = 0; i < deep; ++i)
                rule.repl.push_back({-1, sym(), label_role::fresh_of(0)});
            for (int i = 0; i < shallow; ++i)
                rule.repl.push_back({-1, sym(), label_role::of_head(0)});
        }
        int nfn = pick(rng, 0, 2);
        for (int i = 0; i < nfn; ++i) {
            layer_fn fn;
            bool app = pick(rng, 0, 3) > 0;
            fn.kind = app ? layer_fn_kind::append : layer_fn_kind::insert;
            if (app) {
                int t = pick(rng, 0, 2);
                fn.target = t == 0 ? child_target::fresh() : child_target::slot_k(t);
            } else {
                fn.target = child_target::in_word();
            }
            int plen = pick(rng, 1, 2);
            for (int p = 0; p < plen; ++p) fn.payload.push_back(sym());
            rule.chain.push_back(std::move(fn));
        }
        g.rules.push_back(std::move(rule));
    }
    std::shuffle(g.rules.begin(), g.rules.end(), rng);
    for (std::size_t i = 0; i < g.rules.size(); ++i)
        g.rules[i].name = "r" + std::to_string(i + 1);
    return g;
}

prefix_grammar random_plain_pg(std::mt19937& rng) {
    static const std::vector<std::string> pool{"a", "b", "c", "d"};
    prefix_grammar g;
    int nsym = pick(rng, 2, 4);
    auto sym = [&] { return pool[pick(rng, 0, nsym - 1)]; };
    int ninit = pick(rng, 2, 4);
    for (int i = 0; i < ninit; ++i) g.init.push_back(sym());
    int nrules = pick(rng, nsym, nsym + 3);
    for (int r = 0; r < nrules; ++r) {
        prefix_rule rule;
        rule.lhs.push_back(r < nsym ? pool[r] : sym());
        if (pick(rng, 0, 2) == 0) rule.lhs.push_back(sym());
        int nrhs = pick(rng, 0, 3);
        for (int i = 0; i < nrhs; ++i) rule.rhs.push_back(sym());
        g.rules.push_back(std::move(rule));
    }
    std::shuffle(g.rules.begin(), g.rules.end(), rng);
    return g;
}

}  // namespace mlpg
