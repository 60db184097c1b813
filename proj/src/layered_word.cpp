#include "mlpg/layered_word.hpp"

#include <functional>
#include <map>
#include <stdexcept>

namespace mlpg {

lword project(const lword& w, label_id s) {
    lword out;
    for (const auto& l : w.letters)
        if (l.label == s) out.letters.push_back(l);
    return out;
}

lword coproject(const lword& w, label_id s) {
    lword out;
    for (const auto& l : w.letters)
        if (l.label != s) out.letters.push_back(l);
    return out;
}

std::vector<std::string> plain(const lword& w) {
    std::vector<std::string> out;
    out.reserve(w.letters.size());
    for (const auto& l : w.letters) out.push_back(l.sym);
    return out;
}

std::string plain_str(const std::vector<std::string>& syms) {
    bool all_single = true;
    for (const auto& s : syms)
        if (s.size() != 1) { all_single = false; break; }
    std::string out;
    for (std::size_t i = 0; i < syms.size(); ++i) {
        if (!all_single && i) out += ' ';
        out += syms[i];
    }
    return out;
}

std::string plain_str(const lword& w) { return plain_str(plain(w)); }

std::set<label_id> labels_of(const lword& w) {
    std::set<label_id> out;
    for (const auto& l : w.letters) out.insert(l.label);
    return out;
}

std::string tree_view(const label_registry& reg, const lword& w) {
    auto labels = labels_of(w);
    for (label_id s : labels)
        if (!reg.valid(s)) throw std::invalid_argument("tree_view: label not in registry");

    std::map<label_id, std::string> content;
    for (const auto& l : w.letters) {
        auto& c = content[l.label];
        if (!c.empty() && l.sym.size() > 1) c += ' ';
        c += l.sym;
    }
    // Roots within the word's label set: labels with no strict ancestor in the set.
    std::vector<label_id> roots;
    for (label_id s : labels) {
        bool has_anc = false;
        for (label_id t : labels)
            if (t != s && reg.precedes(t, s)) { has_anc = true; break; }
        if (!has_anc) roots.push_back(s);
    }
    std::string out;
    std::function<void(label_id, int)> emit = [&](label_id s, int depth) {
        out.append(static_cast<std::size_t>(depth) * 2, ' ');
        out += "s" + reg.path(s) + ": " + content[s] + "\n";
        for (label_id c : reg.child_of(s, labels)) emit(c, depth + 1);
    };
    for (label_id r : roots) emit(r, 0);
    return out;
}

std::string to_string(const label_registry& reg, const lword& w) {
    std::string out;
    for (const auto& l : w.letters)
        out += "[" + l.sym + "@" + reg.path(l.label) + "]";
    return out;
}

std::string to_string(const label_registry& reg, const gword& g) {
    std::string out = to_string(reg, g.visible);
    if (g.invisible.empty()) return out;
    return (out.empty() ? "$ " : out + " $ ") + to_string(reg, g.invisible);
}

} // namespace mlpg
