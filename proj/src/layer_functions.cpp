#include "mlpg/layer_functions.hpp"

#include <algorithm>

namespace mlpg {
namespace {

bool labels_letter(const lword& w, label_id t) {
    return std::any_of(w.letters.begin(), w.letters.end(),
                       [&](const lletter& l) { return l.label == t; });
}

// Direct registry children of `parent` with id < bound, in allocation order.
std::vector<label_id> registry_children(const label_registry& reg, label_id parent,
                                        label_id bound) {
    std::vector<label_id> out;
    for (label_id c = 0; c < bound; ++c)
        if (reg.parent(c) == std::optional<label_id>{parent}) out.push_back(c);
    return out;
}

} // namespace

label_id resolve_child_target(label_registry& reg, const lword& w, const child_target& t,
                              label_id anchor, const named_labels* named,
                              bool must_exist_in_word) {
    label_id s = no_label;
    switch (t.kind) {
    case child_target_kind::fresh:
        if (must_exist_in_word)
            throw layer_fn_error("fresh child target is only valid for append");
        return reg.new_child(anchor);
    case child_target_kind::slot:
        s = reg.child_slot(anchor, t.slot);
        break;
    case child_target_kind::in_word: {
        std::set<label_id> ls = labels_of(w);
        ls.insert(anchor);
        std::vector<label_id> kids = reg.child_of(anchor, ls);
        if (kids.empty()) throw layer_fn_error("no child of the anchor labels this word");
        if (kids.size() > 1)
            throw layer_fn_error("child-in-word target is ambiguous: several minimal children");
        return kids.front();
    }
    case child_target_kind::named: {
        if (named == nullptr) throw layer_fn_error("named label '" + t.name + "' unbound");
        auto found = named->find(t.name);
        if (!found) throw layer_fn_error("named label '" + t.name + "' unbound");
        s = *found;
        break;
    }
    case child_target_kind::concrete:
        s = t.label;
        break;
    }
    if (!reg.valid(s)) throw layer_fn_error("target label is not in the registry");
    if (!reg.precedes(anchor, s))
        throw layer_fn_error("target label is not below the anchor");
    if (must_exist_in_word && !labels_letter(w, s))
        throw layer_fn_error("target label has no letters in the word");
    return s;
}

lword apply_layer_fn(label_registry& reg, uid_source& uids, const lword& w,
                     const layer_fn& fn, label_id anchor, const named_labels* named) {
    lword out = w;
    switch (fn.kind) {
    case layer_fn_kind::append: {
        label_id s = resolve_child_target(reg, w, fn.target, anchor, named, false);
        for (const auto& sym : fn.payload) out.letters.push_back({sym, s, uids.fresh()});
        return out;
    }
    case layer_fn_kind::insert: {
        label_id s = resolve_child_target(reg, w, fn.target, anchor, named, true);
        std::optional<label_id> p = reg.parent(s);
        if (!p) throw layer_fn_error("insert target has no parent layer");
        label_id m = reg.insert_between(*p, s);
        for (const auto& sym : fn.payload) out.letters.push_back({sym, m, uids.fresh()});
        return out;
    }
    case layer_fn_kind::erase: {
        label_id s = resolve_child_target(reg, w, fn.target, anchor, named, true);
        std::erase_if(out.letters, [&](const lletter& l) {
            return l.label == s || reg.precedes(s, l.label);
        });
        return out;
    }
    case layer_fn_kind::copy: {
        label_id s = resolve_child_target(reg, w, fn.target, anchor, named, true);
        // Clone the registry subtree under s; ids below `bound` are originals.
        const label_id bound = static_cast<label_id>(reg.size());
        std::map<label_id, label_id> clone;
        clone[s] = reg.new_child(anchor);
        std::vector<label_id> queue{s};
        while (!queue.empty()) {
            label_id cur = queue.back();
            queue.pop_back();
            for (label_id c : registry_children(reg, cur, bound)) {
                clone[c] = reg.new_child(clone[cur]);
                queue.push_back(c);
            }
        }
        for (const auto& l : w.letters) {
            auto it = clone.find(l.label);
            if (it != clone.end()) out.letters.push_back({l.sym, it->second, uids.fresh()});
        }
        return out;
    }
    }
    throw layer_fn_error("unknown layer function kind");
}

lword apply_chain(label_registry& reg, uid_source& uids, const lword& w,
                  const layer_chain& chain, label_id anchor, int k1, int k2,
                  const named_labels* named) {
    if (static_cast<int>(chain.size()) > k1)
        throw layer_fn_error("layer chain longer than the replication bound");
    lword cur = w;
    for (const auto& fn : chain) {
        bool payload_bounded = fn.kind == layer_fn_kind::append || fn.kind == layer_fn_kind::insert;
        if (payload_bounded && static_cast<int>(fn.payload.size()) > k2)
            throw layer_fn_error("layer payload longer than the rewrite-depth bound");
        cur = apply_layer_fn(reg, uids, cur, fn, anchor, named);
    }
    return cur;
}

} // namespace mlpg
