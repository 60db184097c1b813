// Label registry: a growing forest whose strict-ancestor relation is the
// partial order on stack-layer labels. Labels are never reused or freed.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace mlpg {

using label_id = std::uint32_t;
inline constexpr label_id no_label = static_cast<label_id>(-1);

class label_registry {
public:
    // Allocates a label incomparable to every existing one.
    label_id new_root();

    // Allocates a fresh strict descendant placed directly under `parent`.
    label_id new_child(label_id parent);

    // Splices a fresh label m between `anc` and its direct child `desc`,
    // so that anc < m < desc afterwards. Only adds comparabilities.
    label_id insert_between(label_id anc, label_id desc);

    // Strict ancestor test: a < b.
    bool precedes(label_id a, label_id b) const;

    std::optional<label_id> parent(label_id s) const;

    // Children of s0 with respect to a label subset containing s0:
    // minimal elements of {t in subset : s0 < t}.
    std::vector<label_id> child_of(label_id s0, const std::set<label_id>& subset) const;

    // Deterministic per-parent child slot: first request allocates, later
    // requests return the same label. Slot 0 is never used.
    label_id child_slot(label_id parent, int slot);

    // Display path of allocation ordinals, e.g. "0.1.3". Presentation only;
    // paths shift when insert_between reparents a node.
    std::string path(label_id s) const;

    std::size_t size() const { return parent_.size(); }
    bool valid(label_id s) const { return s < parent_.size(); }

private:
    label_id alloc(std::optional<label_id> parent);

    std::vector<std::optional<label_id>> parent_;
    std::vector<std::uint32_t> ord_;             // ordinal among siblings at allocation
    std::vector<std::uint32_t> next_child_ord_;  // child ordinals start at 1
    std::uint32_t next_root_ord_ = 0;
    std::map<std::pair<label_id, int>, label_id> slots_;
};

} // namespace mlpg
