// Layered words: sequences of (symbol, label) letters with per-occurrence
// uids, split into a visible and an invisible layer around a structural '$'.
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "mlpg/labels.hpp"

namespace mlpg {

using occ_uid = std::uint64_t;

// Fresh occurrence ids, one source per trace/driving session.
struct uid_source {
    occ_uid next = 1;
    occ_uid fresh() { return next++; }
};

struct lletter {
    std::string sym;
    label_id label = no_label;
    occ_uid uid = 0;
};

inline bool operator==(const lletter& a, const lletter& b) {
    return a.sym == b.sym && a.label == b.label && a.uid == b.uid;
}

struct lword {
    std::vector<lletter> letters;

    std::size_t size() const { return letters.size(); }
    bool empty() const { return letters.empty(); }
    // 1-based indexing, front = position 1.
    const lletter& at1(std::size_t i) const { return letters.at(i - 1); }
};

struct gword {
    lword visible;
    lword invisible;
};

// Subsequence of letters labelled s (order and uids preserved).
lword project(const lword& w, label_id s);
// Complementary subsequence; interleaving both by position rebuilds w.
lword coproject(const lword& w, label_id s);

std::vector<std::string> plain(const lword& w);
// Single-char symbols concatenate; otherwise symbols are space-separated.
std::string plain_str(const lword& w);
std::string plain_str(const std::vector<std::string>& syms);

std::set<label_id> labels_of(const lword& w);

// Indented rendering that groups letters by label under the ancestor tree.
// Throws if a label is not a registry member.
std::string tree_view(const label_registry& reg, const lword& w);

// Textual form "[h@0][f@0] $ [g@0.1]".
std::string to_string(const label_registry& reg, const gword& g);
std::string to_string(const label_registry& reg, const lword& w);

} // namespace mlpg
