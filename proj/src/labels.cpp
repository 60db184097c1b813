#include "mlpg/labels.hpp"

#include <stdexcept>

namespace mlpg {

label_id label_registry::alloc(std::optional<label_id> parent) {
    label_id id = static_cast<label_id>(parent_.size());
    parent_.push_back(parent);
    if (parent) {
        ord_.push_back(next_child_ord_[*parent]++);
    } else {
        ord_.push_back(next_root_ord_++);
    }
    next_child_ord_.push_back(1);
    return id;
}

label_id label_registry::new_root() {
    return alloc(std::nullopt);
}

label_id label_registry::new_child(label_id parent) {
    if (!valid(parent)) throw std::invalid_argument("new_child: unknown parent label");
    return alloc(parent);
}

label_id label_registry::insert_between(label_id anc, label_id desc) {
    if (!valid(anc) || !valid(desc)) throw std::invalid_argument("insert_between: unknown label");
    if (parent_[desc] != anc)
        throw std::invalid_argument("insert_between: desc is not a direct child of anc");
    label_id m = alloc(anc);
    parent_[desc] = m;
    return m;
}

bool label_registry::precedes(label_id a, label_id b) const {
    if (!valid(a) || !valid(b) || a == b) return false;
    std::optional<label_id> cur = parent_[b];
    while (cur) {
        if (*cur == a) return true;
        cur = parent_[*cur];
    }
    return false;
}

std::optional<label_id> label_registry::parent(label_id s) const {
    if (!valid(s)) return std::nullopt;
    return parent_[s];
}

std::vector<label_id> label_registry::child_of(label_id s0, const std::set<label_id>& subset) const {
    if (!subset.count(s0)) throw std::invalid_argument("child_of: s0 not in subset");
    std::vector<label_id> out;
    for (label_id t : subset) {
        if (!precedes(s0, t)) continue;
        bool minimal = true;
        for (label_id u : subset) {
            if (u != t && precedes(s0, u) && precedes(u, t)) { minimal = false; break; }
        }
        if (minimal) out.push_back(t);
    }
    return out;
}

label_id label_registry::child_slot(label_id parent, int slot) {
    if (!valid(parent)) throw std::invalid_argument("child_slot: unknown parent label");
    auto key = std::make_pair(parent, slot);
    auto it = slots_.find(key);
    if (it != slots_.end()) return it->second;
    label_id c = new_child(parent);
    slots_.emplace(key, c);
    return c;
}

std::string label_registry::path(label_id s) const {
    if (!valid(s)) return "?";
    std::vector<std::uint32_t> parts;
    std::optional<label_id> cur = s;
    while (cur) {
        parts.push_back(ord_[*cur]);
        cur = parent_[*cur];
    }
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!out.empty()) out += '.';
        out += std::to_string(*it);
    }
    return out;
}

} // namespace mlpg
