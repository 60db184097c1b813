// Elementary layer functions (append / insert / delete / copy) acting on an
// invisible layer, plus bounded chains of them anchored at a label s_i.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlpg/layered_word.hpp"

namespace mlpg {

enum class layer_fn_kind { append, insert, erase, copy };

// How a function locates the child label it acts on, resolved at application
// time relative to the anchor s_i.
enum class child_target_kind {
    fresh,        // append only: a brand-new child of the anchor
    slot,         // registry child slot #k of the anchor (allocate once, reuse)
    in_word,      // the unique child of the anchor among the word's labels
    named,        // a named fresh label bound elsewhere in the same rule step
    concrete      // an explicit label id (resolved forms, tests)
};

struct child_target {
    child_target_kind kind = child_target_kind::fresh;
    int slot = 0;             // slot
    std::string name;         // named
    label_id label = no_label; // concrete

    static child_target fresh() { return {}; }
    static child_target slot_k(int k) { return {child_target_kind::slot, k, {}, no_label}; }
    static child_target in_word() { return {child_target_kind::in_word, 0, {}, no_label}; }
    static child_target named_l(std::string n) { return {child_target_kind::named, 0, std::move(n), no_label}; }
    static child_target concrete_l(label_id s) { return {child_target_kind::concrete, 0, {}, s}; }
};

struct layer_fn {
    layer_fn_kind kind = layer_fn_kind::append;
    child_target target;               // append: fresh/slot/named/concrete; others: the child s_j
    std::vector<std::string> payload;  // append/insert letters, length <= K2
};

using layer_chain = std::vector<layer_fn>;  // length <= K1, applied left to right

// Named fresh labels allocated for one rule application (shared between the
// visible replacement and the chain).
struct named_labels {
    std::vector<std::pair<std::string, label_id>> entries;
    std::optional<label_id> find(const std::string& n) const {
        for (const auto& [k, v] : entries)
            if (k == n) return v;
        return std::nullopt;
    }
};

struct layer_fn_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resolve the target to a concrete label. For insert/erase/copy the result
// must be an existing child of the anchor labelling at least one letter of w;
// violations throw layer_fn_error.
label_id resolve_child_target(label_registry& reg, const lword& w, const child_target& t,
                              label_id anchor, const named_labels* named, bool must_exist_in_word);

// Apply one function. Fresh letter uids come from `uids`.
lword apply_layer_fn(label_registry& reg, uid_source& uids, const lword& w,
                     const layer_fn& fn, label_id anchor, const named_labels* named = nullptr);

// Left-to-right composition; enforces chain length <= k1 and payloads <= k2.
lword apply_chain(label_registry& reg, uid_source& uids, const lword& w,
                  const layer_chain& chain, label_id anchor, int k1, int k2,
                  const named_labels* named = nullptr);

} // namespace mlpg
