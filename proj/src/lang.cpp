#include "mlpg/lang.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlpg {

term_ptr mk_var(std::string name) {
    auto t = std::make_shared<term>();
    t->kind = term_kind::var;
    t->name = std::move(name);
    return t;
}

term_ptr mk_ctor(std::string name, std::vector<term_ptr> args) {
    auto t = std::make_shared<term>();
    t->kind = term_kind::ctor;
    t->name = std::move(name);
    t->args = std::move(args);
    return t;
}

term_ptr mk_call(std::string name, std::vector<term_ptr> args) {
    auto t = std::make_shared<term>();
    t->kind = term_kind::call;
    t->name = std::move(name);
    t->args = std::move(args);
    return t;
}

term_ptr with_ann(const term_ptr& t, call_ann ann) {
    auto u = std::make_shared<term>(*t);
    u->ann = ann;
    return u;
}

term_ptr mk_num(long n) {
    term_ptr t = mk_ctor("Z");
    for (long k = 0; k < n; ++k) t = mk_ctor("S", {t});
    return t;
}

bool term_eq(const term_ptr& a, const term_ptr& b) {
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size())
        return false;
    for (std::size_t k = 0; k < a->args.size(); ++k)
        if (!term_eq(a->args[k], b->args[k])) return false;
    return true;
}

std::string term_str(const term_ptr& t) {
    if (t->kind == term_kind::var) return t->name;
    if (t->kind == term_kind::ctor && t->name == "Z") return "0";
    if (t->kind == term_kind::ctor && t->name == "S") {
        std::size_t plus = 0;
        term_ptr base = t;
        while (base->kind == term_kind::ctor && base->name == "S") {
            ++plus;
            base = base->args.at(0);
        }
        if (base->kind == term_kind::ctor && base->name == "Z")
            return std::to_string(plus);
        std::string out = term_str(base);
        for (std::size_t k = 0; k < plus; ++k) out += "+1";
        return out;
    }
    std::string out = t->name;
    if (!t->args.empty()) {
        out += '(';
        for (std::size_t k = 0; k < t->args.size(); ++k) {
            if (k) out += ',';
            out += term_str(t->args[k]);
        }
        out += ')';
    }
    return out;
}

namespace {

bool is_var_name(const std::string& id) {
    static const std::string prefixes = "xyzvwu";
    if (id.empty() || prefixes.find(id[0]) == std::string::npos) return false;
    return std::all_of(id.begin() + 1, id.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

struct term_parser {
    const std::string& s;
    std::size_t pos = 0;

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool peek(char c) {
        skip();
        return pos < s.size() && s[pos] == c;
    }
    void expect(char c) {
        if (!peek(c)) throw std::runtime_error(std::string("expected '") + c + "' in term: " + s);
        ++pos;
    }
    std::string ident() {
        skip();
        std::size_t b = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' || s[pos] == '^'))
            ++pos;
        if (b == pos) throw std::runtime_error("expected identifier in term: " + s);
        return s.substr(b, pos - b);
    }

    term_ptr primary() {
        skip();
        if (pos >= s.size()) throw std::runtime_error("unexpected end of term: " + s);
        if (std::isdigit(static_cast<unsigned char>(s[pos]))) {
            std::size_t b = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            return mk_num(std::stol(s.substr(b, pos - b)));
        }
        if (s[pos] == '(') {
            ++pos;
            term_ptr t = full();
            expect(')');
            return t;
        }
        std::string id = ident();
        std::vector<term_ptr> args;
        bool parens = false;
        if (peek('(')) {
            parens = true;
            ++pos;
            if (!peek(')')) {
                args.push_back(full());
                while (peek(',')) {
                    ++pos;
                    args.push_back(full());
                }
            }
            expect(')');
        }
        if (std::isupper(static_cast<unsigned char>(id[0]))) return mk_ctor(id, std::move(args));
        if (!parens && is_var_name(id)) return mk_var(id);
        if (!parens)
            throw std::runtime_error("bare identifier '" + id + "' is not a variable: " + s);
        return mk_call(id, std::move(args));
    }

    term_ptr full() {
        term_ptr t = primary();
        while (peek('+')) {
            ++pos;
            skip();
            std::size_t b = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (b == pos) throw std::runtime_error("expected number after '+' in term: " + s);
            long n = std::stol(s.substr(b, pos - b));
            for (long k = 0; k < n; ++k) t = mk_ctor("S", {t});
        }
        return t;
    }
};

}  // namespace

term_ptr parse_term(const std::string& text) {
    term_parser p{text};
    term_ptr t = p.full();
    p.skip();
    if (p.pos != text.size()) throw std::runtime_error("trailing input in term: " + text);
    return t;
}

term_ptr apply_subst(const term_ptr& t, const subst_map& s) {
    if (t->kind == term_kind::var) {
        auto it = s.find(t->name);
        return it == s.end() ? t : it->second;
    }
    if (t->args.empty()) return t;
    bool changed = false;
    std::vector<term_ptr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) {
        args.push_back(apply_subst(a, s));
        changed = changed || args.back() != a;
    }
    if (!changed) return t;
    auto u = std::make_shared<term>(*t);
    u->args = std::move(args);
    return u;
}

static void free_vars_into(const term_ptr& t, std::vector<std::string>& out,
                           std::set<std::string>& seen) {
    if (t->kind == term_kind::var) {
        if (seen.insert(t->name).second) out.push_back(t->name);
        return;
    }
    for (const auto& a : t->args) free_vars_into(a, out, seen);
}

std::vector<std::string> free_vars(const term_ptr& t) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    free_vars_into(t, out, seen);
    return out;
}

bool is_ground_ctor(const term_ptr& t) {
    if (t->kind != term_kind::ctor) return false;
    return std::all_of(t->args.begin(), t->args.end(), is_ground_ctor);
}

bool has_call(const term_ptr& t) {
    if (t->kind == term_kind::call) return true;
    return std::any_of(t->args.begin(), t->args.end(), has_call);
}

std::optional<long> as_num(const term_ptr& t) {
    long n = 0;
    term_ptr cur = t;
    while (cur->kind == term_kind::ctor && cur->name == "S") {
        ++n;
        cur = cur->args.at(0);
    }
    if (cur->kind == term_kind::ctor && cur->name == "Z") return n;
    return std::nullopt;
}

static bool renaming_walk(const term_ptr& a, const term_ptr& b,
                          std::map<std::string, std::string>& fwd,
                          std::map<std::string, std::string>& bwd) {
    if (a->kind == term_kind::var) {
        if (b->kind != term_kind::var) return false;
        auto [fit, f_new] = fwd.emplace(a->name, b->name);
        if (!f_new && fit->second != b->name) return false;
        auto [bit, b_new] = bwd.emplace(b->name, a->name);
        return b_new || bit->second == a->name;
    }
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size())
        return false;
    for (std::size_t k = 0; k < a->args.size(); ++k)
        if (!renaming_walk(a->args[k], b->args[k], fwd, bwd)) return false;
    return true;
}

std::optional<std::map<std::string, std::string>> match_renaming(const term_ptr& a,
                                                                 const term_ptr& b) {
    std::map<std::string, std::string> fwd, bwd;
    if (renaming_walk(a, b, fwd, bwd)) return fwd;
    return std::nullopt;
}

static bool instance_walk(const term_ptr& a, const term_ptr& b, subst_map& sub) {
    if (a->kind == term_kind::var) {
        auto [it, fresh] = sub.emplace(a->name, b);
        return fresh || term_eq(it->second, b);
    }
    if (a->kind != b->kind || a->name != b->name || a->args.size() != b->args.size())
        return false;
    for (std::size_t k = 0; k < a->args.size(); ++k)
        if (!instance_walk(a->args[k], b->args[k], sub)) return false;
    return true;
}

std::optional<subst_map> match_instance(const term_ptr& a, const term_ptr& b) {
    subst_map sub;
    if (instance_walk(a, b, sub)) return sub;
    return std::nullopt;
}

// ---- programs ----

static bool flat_pattern(const term_ptr& p) {
    if (p->kind == term_kind::var) return true;
    if (p->kind != term_kind::ctor) return false;
    return std::all_of(p->args.begin(), p->args.end(),
                       [](const term_ptr& a) { return a->kind == term_kind::var; });
}

static bool deep_pattern(const term_ptr& p) {
    if (p->kind == term_kind::var) return true;
    if (p->kind != term_kind::ctor) return false;
    return std::all_of(p->args.begin(), p->args.end(), deep_pattern);
}

static void collect_calls(const term_ptr& t, std::vector<std::string>& out) {
    if (t->kind == term_kind::call) out.push_back(t->name);
    for (const auto& a : t->args) collect_calls(a, out);
}

void validate_program(const program_l& p, bool allow_deep) {
    std::map<std::string, std::size_t> arity;
    for (const auto& r : p.rules) {
        auto [it, fresh] = arity.emplace(r.fname, r.patterns.size());
        if (!fresh && it->second != r.patterns.size())
            throw std::runtime_error("inconsistent arity for " + r.fname);
        std::set<std::string> head_vars;
        for (const auto& pat : r.patterns) {
            if (!(allow_deep ? deep_pattern(pat) : flat_pattern(pat)))
                throw std::runtime_error("bad pattern in rule of " + r.fname + ": " +
                                         term_str(pat));
            for (const auto& v : free_vars(pat))
                if (!head_vars.insert(v).second)
                    throw std::runtime_error("repeated head variable '" + v + "' in " + r.fname);
        }
        for (const auto& v : free_vars(r.body))
            if (!head_vars.count(v))
                throw std::runtime_error("body variable '" + v + "' not bound in " + r.fname);
    }
    for (std::size_t a = 0; a < p.rules.size(); ++a)
        for (std::size_t b = a + 1; b < p.rules.size(); ++b) {
            if (p.rules[a].fname != p.rules[b].fname) continue;
            bool same = true;
            for (std::size_t k = 0; k < p.rules[a].patterns.size() && same; ++k)
                same = match_renaming(p.rules[a].patterns[k], p.rules[b].patterns[k]).has_value();
            if (same)
                throw std::runtime_error("duplicate patterns in rules of " + p.rules[a].fname);
        }
    std::vector<std::string> calls;
    for (const auto& r : p.rules) collect_calls(r.body, calls);
    for (const auto& c : calls)
        if (!arity.count(c)) throw std::runtime_error("call to undefined function " + c);
}

program_l parse_program_l(const std::string& text, bool allow_deep) {
    program_l p;
    std::string cleaned;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        cleaned += line;
        cleaned += '\n';
    }
    std::size_t pos = 0;
    while (pos < cleaned.size()) {
        std::size_t semi = cleaned.find(';', pos);
        std::string chunk = semi == std::string::npos ? cleaned.substr(pos)
                                                      : cleaned.substr(pos, semi - pos);
        pos = semi == std::string::npos ? cleaned.size() : semi + 1;
        std::string t = chunk;
        t.erase(std::remove_if(t.begin(), t.end(),
                               [](unsigned char c) { return std::isspace(c); }),
                t.end());
        if (t.empty()) continue;
        std::size_t eq = chunk.find('=');
        if (eq == std::string::npos) throw std::runtime_error("rule needs '=': " + chunk);
        term_ptr lhs = parse_term(chunk.substr(0, eq));
        if (lhs->kind != term_kind::call)
            throw std::runtime_error("rule head must be a call: " + chunk);
        rule_l r;
        r.fname = lhs->name;
        r.patterns = lhs->args;
        r.body = parse_term(chunk.substr(eq + 1));
        p.rules.push_back(std::move(r));
    }
    validate_program(p, allow_deep);
    return p;
}

program_l load_program_file(const std::string& path, bool allow_deep) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_program_l(buf.str(), allow_deep);
}

program_bundle parse_program_bundle(const std::string& text, bool allow_deep) {
    program_bundle b;
    std::string rest;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::size_t hash = line.find('#');
        std::string bare = hash == std::string::npos ? line : line.substr(0, hash);
        std::size_t from = bare.find_first_not_of(" \t\r");
        if (from != std::string::npos && bare.compare(from, 6, "entry:") == 0) {
            std::string e = bare.substr(from + 6);
            std::size_t semi = e.find(';');
            if (semi != std::string::npos) e = e.substr(0, semi);
            b.entry = parse_term(e);
            continue;
        }
        rest += line;
        rest += '\n';
    }
    b.program = parse_program_l(rest, allow_deep);
    return b;
}

program_bundle load_program_bundle(const std::string& path, bool allow_deep) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_program_bundle(buf.str(), allow_deep);
}

std::string to_string(const program_l& p) {
    std::ostringstream os;
    for (const auto& r : p.rules) {
        os << r.fname << '(';
        for (std::size_t k = 0; k < r.patterns.size(); ++k)
            os << (k ? "," : "") << term_str(r.patterns[k]);
        os << ")=" << term_str(r.body) << ";\n";
    }
    return os.str();
}

static std::vector<const rule_l*> rules_of(const program_l& p, const std::string& fname) {
    std::vector<const rule_l*> out;
    for (const auto& r : p.rules)
        if (r.fname == fname) out.push_back(&r);
    return out;
}

bool is_f_function(const program_l& p, const std::string& fname) {
    auto rs = rules_of(p, fname);
    if (rs.size() != 1) return false;
    return std::all_of(rs[0]->patterns.begin(), rs[0]->patterns.end(),
                       [](const term_ptr& t) { return t->kind == term_kind::var; });
}

std::size_t arity_of(const program_l& p, const std::string& fname) {
    auto rs = rules_of(p, fname);
    if (rs.empty()) throw std::runtime_error("unknown function " + fname);
    return rs[0]->patterns.size();
}

std::vector<std::size_t> needed_columns(const program_l& p, const std::string& fname) {
    std::vector<std::size_t> out;
    auto rs = rules_of(p, fname);
    if (rs.empty()) return out;
    for (std::size_t c = 0; c < rs[0]->patterns.size(); ++c)
        for (const rule_l* r : rs)
            if (r->patterns[c]->kind != term_kind::var) {
                out.push_back(c);
                break;
            }
    return out;
}

bool is_ready(const program_l& p, const term_ptr& call) {
    for (std::size_t c : needed_columns(p, call->name))
        if (call->args.at(c)->kind == term_kind::call) return false;
    return true;
}

term_ptr blocking_child(const program_l& p, const term_ptr& call) {
    for (std::size_t c : needed_columns(p, call->name))
        if (call->args.at(c)->kind == term_kind::call) return call->args[c];
    return nullptr;
}

// ---- stack words ----

static void max_calls(const term_ptr& t, std::vector<term_ptr>& out) {
    if (t->kind == term_kind::call) {
        out.push_back(t);
        return;
    }
    for (const auto& a : t->args) max_calls(a, out);
}

namespace {

// Shared walk over call groups: the blocked cascade from a group root shares
// one letter group; every other maximal call starts a new group.
template <typename OnLetter, typename OnGroup>
void walk_group(const program_l& p, const term_ptr& root, OnLetter&& on_letter,
                OnGroup&& on_group) {
    std::vector<term_ptr> chain;
    term_ptr cur = root;
    for (;;) {
        chain.push_back(cur);
        term_ptr block = is_ready(p, cur) ? nullptr : blocking_child(p, cur);
        for (const auto& arg : cur->args) {
            if (block && arg == block) continue;
            std::vector<term_ptr> roots;
            max_calls(arg, roots);
            for (const auto& r : roots) on_group(r);
        }
        if (!block) break;
        cur = block;
    }
    // innermost letter first
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) on_letter(*it, chain);
}

}  // namespace

gword extract_stack_word(const program_l& p, const term_ptr& t) {
    gword out;
    std::vector<term_ptr> roots;
    max_calls(t, roots);
    if (roots.empty()) return out;
    // Process visibly from the first maximal call; passives follow in
    // depth-first discovery order.
    std::vector<std::vector<term_ptr>> groups;
    std::vector<term_ptr> queue(roots.rbegin(), roots.rend());
    while (!queue.empty()) {
        term_ptr g = queue.back();
        queue.pop_back();
        std::vector<term_ptr> letters;
        std::vector<term_ptr> found;
        walk_group(
            p, g, [&](const term_ptr& c, const std::vector<term_ptr>&) { letters.push_back(c); },
            [&](const term_ptr& d) { found.push_back(d); });
        groups.push_back(std::move(letters));
        for (auto it = found.rbegin(); it != found.rend(); ++it) queue.push_back(*it);
    }
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        for (const auto& c : groups[gi]) {
            lletter l{c->name, c->ann.label, c->ann.uid};
            if (gi == 0)
                out.visible.letters.push_back(l);
            else
                out.invisible.letters.push_back(l);
        }
    }
    return out;
}

namespace {

term_ptr deep_copy(const term_ptr& t) {
    auto u = std::make_shared<term>(*t);
    for (auto& a : u->args) a = deep_copy(a);
    return u;
}

struct annotator {
    const program_l& p;
    label_registry& reg;
    uid_source& uids;
    std::set<occ_uid> seen;
    std::map<const term*, call_ann> assign;

    // Returns the label this call ends up with.
    label_id place(const term_ptr& c, label_id ctx) {
        call_ann a = c->ann;
        if (a.uid == 0 || seen.count(a.uid) || !reg.valid(a.label)) {
            a.uid = uids.fresh();
            a.label = ctx;
        }
        seen.insert(a.uid);
        assign[c.get()] = a;
        return a.label;
    }

    void group(const term_ptr& root, label_id ctx) {
        term_ptr cur = root;
        label_id cur_label = ctx;
        for (;;) {
            cur_label = place(cur, cur_label);
            term_ptr block = is_ready(p, cur) ? nullptr : blocking_child(p, cur);
            for (const auto& arg : cur->args) {
                if (block && arg == block) continue;
                std::vector<term_ptr> roots;
                max_calls(arg, roots);
                for (const auto& r : roots) {
                    // inherited groups keep their own label; new subtrees root
                    // a fresh child of the enclosing call's label
                    call_ann ra = r->ann;
                    bool kept = ra.uid != 0 && !seen.count(ra.uid) && reg.valid(ra.label);
                    group(r, kept ? ra.label : reg.new_child(cur_label));
                }
            }
            if (!block) break;
            cur = block;
        }
    }

    term_ptr rebuild(const term_ptr& t) {
        auto u = std::make_shared<term>(*t);
        auto it = assign.find(t.get());
        if (it != assign.end()) u->ann = it->second;
        for (auto& a : u->args) a = rebuild(a);
        return u;
    }
};

}  // namespace

term_ptr annotate(const program_l& p, label_registry& reg, uid_source& uids,
                  const term_ptr& t, label_id root_ctx) {
    term_ptr fresh = deep_copy(t);  // every occurrence becomes a unique node
    annotator an{p, reg, uids, {}, {}};
    std::vector<term_ptr> roots;
    max_calls(fresh, roots);
    for (std::size_t k = 0; k < roots.size(); ++k) {
        call_ann ra = roots[k]->ann;
        bool kept = ra.uid != 0 && !an.seen.count(ra.uid) && reg.valid(ra.label);
        label_id ctx = kept ? ra.label : (k == 0 ? root_ctx : reg.new_child(root_ctx));
        an.group(roots[k], ctx);
    }
    return an.rebuild(fresh);
}

// ---- driving ----

std::string drive_session::fresh_var() { return "x" + std::to_string(++var_counter); }

term_ptr init_config(const program_l& p, drive_session& s, const term_ptr& entry) {
    return annotate(p, s.reg, s.uids, entry, s.reg.new_root());
}

namespace {

term_ptr find_redex(const program_l& p, const term_ptr& config) {
    std::vector<term_ptr> roots;
    max_calls(config, roots);
    if (roots.empty()) return nullptr;
    term_ptr cur = roots[0];
    while (!is_ready(p, cur)) cur = blocking_child(p, cur);
    return cur;
}

term_ptr replace_node(const term_ptr& t, const term* target, const term_ptr& repl) {
    if (t.get() == target) return repl;
    if (t->args.empty()) return t;
    bool changed = false;
    std::vector<term_ptr> args;
    args.reserve(t->args.size());
    for (const auto& a : t->args) {
        args.push_back(replace_node(a, target, repl));
        changed = changed || args.back() != a;
    }
    if (!changed) return t;
    auto u = std::make_shared<term>(*t);
    u->args = std::move(args);
    return u;
}

struct shallow_match {
    enum class status { matched, blocked, failed } st = status::failed;
    subst_map binds;
    std::string blocked_var;
};

shallow_match match_rule_args(const rule_l& r, const std::vector<term_ptr>& args) {
    shallow_match m;
    for (std::size_t c = 0; c < r.patterns.size(); ++c) {
        const term_ptr& pat = r.patterns[c];
        const term_ptr& arg = args.at(c);
        if (pat->kind == term_kind::var) {
            m.binds[pat->name] = arg;
            continue;
        }
        if (arg->kind == term_kind::var) {
            m.st = shallow_match::status::blocked;
            m.blocked_var = arg->name;
            return m;
        }
        if (arg->kind != term_kind::ctor || arg->name != pat->name ||
            arg->args.size() != pat->args.size()) {
            m.st = shallow_match::status::failed;
            return m;
        }
        for (std::size_t k = 0; k < pat->args.size(); ++k)
            m.binds[pat->args[k]->name] = arg->args[k];
    }
    m.st = shallow_match::status::matched;
    return m;
}

// First rule of the redex's function that matches or is blocked on a variable.
shallow_match select_rule(const program_l& p, const term_ptr& redex, const rule_l** chosen) {
    *chosen = nullptr;
    for (const auto& r : p.rules) {
        if (r.fname != redex->name) continue;
        shallow_match m = match_rule_args(r, redex->args);
        if (m.st == shallow_match::status::failed) continue;
        *chosen = &r;
        return m;
    }
    return {};
}

// Rewrites the redex of config once if a rule matches outright.
term_ptr rewrite_once(const program_l& p, drive_session& s, const term_ptr& config,
                      occ_uid& consumed) {
    term_ptr redex = find_redex(p, config);
    if (!redex) return config;
    const rule_l* r = nullptr;
    shallow_match m = select_rule(p, redex, &r);
    if (!r || m.st != shallow_match::status::matched) return config;
    consumed = redex->ann.uid;
    term_ptr body = apply_subst(r->body, m.binds);
    term_ptr next = replace_node(config, redex.get(), body);
    return annotate(p, s.reg, s.uids, next, redex->ann.label);
}

}  // namespace

drive_result drive_step(const program_l& p, drive_session& s, const term_ptr& config) {
    drive_result out;
    term_ptr redex = find_redex(p, config);
    if (!redex) {
        out.status = drive_status::terminal;
        return out;
    }
    out.redex = redex;
    const rule_l* r = nullptr;
    shallow_match m = select_rule(p, redex, &r);
    if (!r) {
        out.status = drive_status::stuck;
        return out;
    }
    if (m.st == shallow_match::status::matched) {
        occ_uid consumed = 0;
        term_ptr next = rewrite_once(p, s, config, consumed);
        out.branches.push_back({"", nullptr, next, consumed});
        return out;
    }
    // Narrow the scrutinized variable with the disjoint Peano split.
    const std::string v = m.blocked_var;
    term_ptr zero = mk_ctor("Z");
    term_ptr succ = mk_ctor("S", {mk_var(s.fresh_var())});
    for (const term_ptr& pat : {zero, succ}) {
        subst_map sub{{v, pat}};
        term_ptr narrowed = apply_subst(config, sub);
        occ_uid consumed = 0;
        term_ptr next = rewrite_once(p, s, narrowed, consumed);
        out.branches.push_back({v, pat, next, consumed});
    }
    return out;
}

// ---- evaluation ----

namespace {

struct evaluator {
    const program_l& p;
    std::size_t budget;
    bool failed = false;

    term_ptr whnf(term_ptr t) {
        while (!failed && t->kind == term_kind::call) {
            if (budget == 0) {
                failed = true;
                break;
            }
            const rule_l* chosen = nullptr;
            subst_map binds;
            for (const auto& r : p.rules) {
                if (r.fname != t->name) continue;
                binds.clear();
                if (match_pats(r.patterns, t->args, binds)) {
                    chosen = &r;
                    break;
                }
                if (failed) return t;
            }
            if (!chosen) {
                failed = true;
                break;
            }
            --budget;
            t = apply_subst(chosen->body, binds);
        }
        return t;
    }

    bool match_pats(const std::vector<term_ptr>& pats, const std::vector<term_ptr>& args,
                    subst_map& binds) {
        for (std::size_t c = 0; c < pats.size(); ++c)
            if (!match_pat(pats[c], args.at(c), binds)) return false;
        return true;
    }

    bool match_pat(const term_ptr& pat, const term_ptr& arg, subst_map& binds) {
        if (pat->kind == term_kind::var) {
            binds[pat->name] = arg;
            return true;
        }
        term_ptr w = whnf(arg);
        if (failed) return false;
        if (w->kind != term_kind::ctor || w->name != pat->name ||
            w->args.size() != pat->args.size())
            return false;
        for (std::size_t k = 0; k < pat->args.size(); ++k)
            if (!match_pat(pat->args[k], w->args[k], binds)) return false;
        return true;
    }

    term_ptr nf(const term_ptr& t) {
        term_ptr w = whnf(t);
        if (failed) return w;
        if (w->kind == term_kind::var) {
            failed = true;  // ground evaluation only
            return w;
        }
        auto u = std::make_shared<term>(*w);
        for (auto& a : u->args) {
            a = nf(a);
            if (failed) return w;
        }
        return u;
    }
};

}  // namespace

std::optional<term_ptr> eval_ground(const program_l& p, const term_ptr& t, eval_limits lim) {
    evaluator ev{p, lim.rewrites};
    term_ptr out = ev.nf(t);
    if (ev.failed) return std::nullopt;
    return out;
}

}  // namespace mlpg
