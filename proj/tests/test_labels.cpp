#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mlpg/labels.hpp"
#include "oracles.hpp"

#include <random>
#include <vector>

using namespace mlpg;

TEST_CASE("roots are pairwise incomparable") {
    label_registry reg;
    label_id r0 = reg.new_root();
    label_id r1 = reg.new_root();
    CHECK(r0 != r1);
    CHECK_FALSE(reg.precedes(r0, r1));
    CHECK_FALSE(reg.precedes(r1, r0));
    CHECK_FALSE(reg.precedes(r0, r0));
    CHECK_FALSE(reg.parent(r0).has_value());
}

TEST_CASE("children sit strictly below their ancestors") {
    label_registry reg;
    label_id r = reg.new_root();
    label_id c = reg.new_child(r);
    label_id g = reg.new_child(c);
    CHECK(reg.precedes(r, c));
    CHECK(reg.precedes(r, g));
    CHECK(reg.precedes(c, g));
    CHECK_FALSE(reg.precedes(g, r));
    CHECK_FALSE(reg.precedes(c, r));
    CHECK(reg.parent(g) == c);
    CHECK(reg.parent(c) == r);
    // siblings stay incomparable
    label_id c2 = reg.new_child(r);
    CHECK_FALSE(reg.precedes(c, c2));
    CHECK_FALSE(reg.precedes(c2, c));
    CHECK_FALSE(reg.precedes(c2, g));
}

TEST_CASE("insert_between splices and reparents") {
    label_registry reg;
    label_id r = reg.new_root();
    label_id d = reg.new_child(r);
    label_id m = reg.insert_between(r, d);
    CHECK(reg.precedes(r, m));
    CHECK(reg.precedes(m, d));
    CHECK(reg.precedes(r, d));
    CHECK(reg.parent(d) == m);
    CHECK(reg.parent(m) == r);
    // splicing again under the fresh label keeps the chain ordered
    label_id g = reg.new_child(d);
    label_id m2 = reg.insert_between(d, g);
    CHECK(reg.precedes(r, m2));
    CHECK(reg.precedes(d, m2));
    CHECK(reg.precedes(m2, g));
    CHECK(reg.parent(g) == m2);
}

TEST_CASE("insert_between only adds comparabilities") {
    std::mt19937 rng(7);
    label_registry reg;
    std::vector<label_id> ids;
    ids.push_back(reg.new_root());
    ids.push_back(reg.new_root());
    for (int i = 0; i < 28; ++i) {
        label_id p = ids[rng() % ids.size()];
        ids.push_back(reg.new_child(p));
    }
    auto snapshot = [&]() {
        std::vector<std::vector<bool>> m(ids.size(), std::vector<bool>(ids.size()));
        for (std::size_t a = 0; a < ids.size(); ++a)
            for (std::size_t b = 0; b < ids.size(); ++b)
                m[a][b] = reg.precedes(ids[a], ids[b]);
        return m;
    };
    auto before = snapshot();
    // splice at five random parent/child edges
    int spliced = 0;
    for (int tries = 0; tries < 200 && spliced < 5; ++tries) {
        label_id b = ids[rng() % ids.size()];
        std::optional<label_id> a = reg.parent(b);
        if (!a) continue;
        label_id m = reg.insert_between(*a, b);
        CHECK(reg.precedes(*a, m));
        CHECK(reg.precedes(m, b));
        ++spliced;
    }
    REQUIRE(spliced == 5);
    auto after = snapshot();
    for (std::size_t a = 0; a < ids.size(); ++a)
        for (std::size_t b = 0; b < ids.size(); ++b)
            if (before[a][b]) CHECK(after[a][b]);
}

TEST_CASE("precedes matches a parent-pointer walk on a random forest") {
    std::mt19937 rng(11);
    label_registry reg;
    std::vector<label_id> ids;
    ids.push_back(reg.new_root());
    for (int op = 0; op < 40; ++op) {
        int kind = static_cast<int>(rng() % 4);
        if (kind == 0) {
            ids.push_back(reg.new_root());
        } else if (kind == 1 || kind == 2) {
            ids.push_back(reg.new_child(ids[rng() % ids.size()]));
        } else {
            label_id p = ids[rng() % ids.size()];
            unsigned slot = 1 + rng() % 3;
            ids.push_back(reg.child_slot(p, slot));
        }
    }
    // a few splices to exercise reparenting
    for (int tries = 0, done = 0; tries < 300 && done < 4; ++tries) {
        label_id b = ids[rng() % ids.size()];
        std::optional<label_id> a = reg.parent(b);
        if (!a) continue;
        ids.push_back(reg.insert_between(*a, b));
        ++done;
    }
    for (label_id a = 0; a < reg.size(); ++a)
        for (label_id b = 0; b < reg.size(); ++b)
            CHECK(reg.precedes(a, b) == oracle::precedes_by_parent_walk(reg, a, b));
}

TEST_CASE("child_of returns minimal strict descendants in id order") {
    label_registry reg;
    label_id r = reg.new_root();
    label_id c1 = reg.new_child(r);
    label_id c2 = reg.new_child(r);
    label_id g1 = reg.new_child(c1);

    // g1 is shadowed by its own ancestor c1
    auto m1 = reg.child_of(r, {r, c1, c2, g1});
    REQUIRE(m1.size() == 2);
    CHECK(m1[0] == c1);
    CHECK(m1[1] == c2);

    // without c1 in the set, g1 becomes minimal
    auto m2 = reg.child_of(r, {r, g1, c2});
    REQUIRE(m2.size() == 2);
    CHECK(m2[0] == std::min(c2, g1));
    CHECK(m2[1] == std::max(c2, g1));

    // r itself and incomparable labels are ignored
    label_id r2 = reg.new_root();
    auto m3 = reg.child_of(r, {r, r2});
    CHECK(m3.empty());
}

TEST_CASE("child_slot allocates once and reuses") {
    label_registry reg;
    label_id r = reg.new_root();
    label_id s1 = reg.child_slot(r, 1);
    label_id s2 = reg.child_slot(r, 2);
    CHECK(s1 != s2);
    CHECK(reg.child_slot(r, 1) == s1);
    CHECK(reg.child_slot(r, 2) == s2);
    CHECK(reg.parent(s1) == r);
    // fresh children never collide with slots
    label_id c = reg.new_child(r);
    CHECK(c != s1);
    CHECK(c != s2);
    CHECK(reg.child_slot(r, 1) == s1);
}

TEST_CASE("paths reflect ancestry on a fresh tree") {
    label_registry reg;
    label_id r = reg.new_root();
    label_id c = reg.new_child(r);
    label_id g = reg.new_child(c);
    std::string pr = reg.path(r), pc = reg.path(c), pg = reg.path(g);
    CHECK(pc.compare(0, pr.size(), pr) == 0);
    CHECK(pc[pr.size()] == '.');
    CHECK(pg.compare(0, pc.size(), pc) == 0);
    CHECK(pg[pc.size()] == '.');
}

TEST_CASE("registries copy by value") {
    label_registry reg;
    label_id r = reg.new_root();
    label_registry copy = reg;
    label_id c = copy.new_child(r);
    CHECK(copy.size() == reg.size() + 1);
    CHECK(copy.valid(c));
    CHECK_FALSE(reg.valid(c));
    CHECK(copy.precedes(r, c));
}
