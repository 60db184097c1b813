#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlpg/constructions.hpp"
#include "mlpg/prefix_grammar.hpp"
#include "mlpg/random_grammar.hpp"
#include "mlpg/supercompile.hpp"
#include "mlpg/whistles.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_domain = 1;
constexpr int exit_budget = 2;

// Single repeated letter longer than 8 prints as c^N.
std::string abbrev(const std::string& w) {
    if (w.size() > 8 && w.find_first_not_of(w[0]) == std::string::npos)
        return std::string(1, w[0]) + "^" + std::to_string(w.size());
    return w;
}

std::string gword_str(const mlpg::gword& w) {
    std::string s = mlpg::plain_str(w.visible);
    if (s.empty()) s = "()";
    std::string inv = mlpg::plain_str(w.invisible);
    if (!inv.empty()) s += " $ " + inv;
    return s;
}

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

struct sink {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit sink(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot write " + path);
        os = &file;
    }
    std::ostream& out() { return *os; }
};

int cmd_pg_run(const std::string& path, std::size_t steps) {
    mlpg::prefix_grammar g = mlpg::load_pg_file(path);
    mlpg::plain_trace tr = mlpg::pg_run(g, steps);
    std::string line;
    for (std::size_t k = 0; k < tr.words.size(); ++k) {
        if (k) line += " -> ";
        line += mlpg::to_string(tr.words[k]);
    }
    std::cout << line << "\n";
    return exit_ok;
}

int cmd_mlpg_run(const std::string& path, std::size_t steps, const std::string& policy) {
    mlpg::mlpg_grammar g = mlpg::load_mlpg_file(path);
    if (policy == "ordered") {
        mlpg::trace_session s = mlpg::make_session(g);
        mlpg::run_ordered(g, s, steps);
        for (const auto& w : s.words) std::cout << gword_str(w) << "\n";
        if (s.halted) std::cout << "halted\n";
        if (s.stuck) std::cout << "stuck\n";
        return exit_ok;
    }
    // all-policy: breadth-first over every applicable match, deduplicated per
    // level by printed form; halting branches stop and print with a '!'.
    struct node {
        mlpg::mlpg_state st;
        bool halting = false;
    };
    std::vector<node> level;
    level.push_back({mlpg::make_state(g), false});
    std::size_t total = 1;
    for (std::size_t depth = 0; depth < steps && !level.empty(); ++depth) {
        std::map<std::string, bool> row;
        for (const auto& n : level) {
            auto [it, fresh] = row.emplace(gword_str(n.st.word), n.halting);
            if (!fresh) it->second = it->second || n.halting;
        }
        std::cout << "level " << depth << ":";
        for (const auto& [w, h] : row) std::cout << " " << w << (h ? " !" : "");
        std::cout << "\n";
        if (depth + 1 == steps) break;
        std::vector<node> next;
        std::set<std::string> seen;
        for (const auto& n : level) {
            if (n.halting) continue;
            for (std::size_t r = 0; r < g.rules.size(); ++r) {
                for (const auto& m : mlpg::match_rule(n.st.reg, g, r, n.st.word)) {
                    auto sr = mlpg::try_step(g, n.st, m);
                    if (!sr) continue;
                    bool halting = g.rules[r].halting;
                    std::string key = gword_str(sr->state.word) + (halting ? "!" : "");
                    if (!seen.insert(key).second) continue;
                    next.push_back({std::move(sr->state), halting});
                    if (++total > 4096) {
                        std::cerr << "exploration exceeded 4096 states\n";
                        return exit_budget;
                    }
                }
            }
        }
        level = std::move(next);
    }
    return exit_ok;
}

int cmd_mlpg_lang(const std::string& path, std::size_t max_len, std::size_t budget,
                  unsigned jobs) {
    mlpg::mlpg_grammar g = mlpg::load_mlpg_file(path);
    mlpg::language_result res = mlpg::enumerate_language(g, max_len, budget, jobs);
    std::string line;
    for (const auto& w : res.words) {
        if (!line.empty()) line += " ";
        line += abbrev(w);
    }
    std::cout << line << "\n";
    return res.exhausted ? exit_budget : exit_ok;
}

void print_turchin(const mlpg::turchin_verdict& v) {
    std::cout << "TURCHIN i=" << v.i << " j=" << v.j << " top=" << v.top
              << " mid=" << v.mid << " ctx=" << v.theta << "\n";
}

int cmd_whistle(const std::string& path, const std::string& relation,
                const std::string& entry_text, std::size_t steps) {
    if (ends_with(path, ".pg")) {
        if (relation != "turchin")
            throw std::runtime_error("plain grammars support only --relation turchin");
        mlpg::prefix_grammar g = mlpg::load_pg_file(path);
        mlpg::plain_trace tr = mlpg::pg_run(g, steps);
        std::string line;
        for (std::size_t k = 0; k < tr.words.size(); ++k) {
            if (k) line += ", ";
            line += mlpg::to_string(tr.words[k]);
        }
        std::cout << line << "\n";
        if (auto v = mlpg::find_first_pair_plain(tr)) {
            std::cout << "TURCHIN i=" << v->i << " j=" << v->j
                      << " top=" << mlpg::plain_str(v->top)
                      << " mid=" << mlpg::plain_str(v->mid)
                      << " ctx=" << mlpg::plain_str(v->theta) << "\n";
        } else {
            std::cout << "NONE\n";
        }
        return exit_ok;
    }
    mlpg::program_bundle b = mlpg::load_program_bundle(path);
    mlpg::term_ptr entry = entry_text.empty() ? b.entry : mlpg::parse_term(entry_text);
    if (!entry) throw std::runtime_error("no entry term: pass --entry or an entry: line");
    mlpg::drive_trace dt = mlpg::drive_path(b.program, entry, steps);
    std::string line;
    for (std::size_t k = 0; k < dt.trace.words.size(); ++k) {
        if (k) line += ", ";
        line += mlpg::plain_visible_str(dt.trace.words[k]);
    }
    std::cout << line << "\n";
    if (relation == "turchin") {
        if (auto v = mlpg::find_first_pair(dt.trace)) print_turchin(*v);
        else std::cout << "NONE\n";
    } else if (relation == "hve") {
        for (std::size_t j = 1; j < dt.configs.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                if (mlpg::hve(dt.configs[i], dt.configs[j])) {
                    std::cout << "HVE i=" << i << " j=" << j
                              << " a=" << mlpg::term_str(dt.configs[i])
                              << " b=" << mlpg::term_str(dt.configs[j]) << "\n";
                    return exit_ok;
                }
        std::cout << "NONE\n";
    } else {
        if (auto v = mlpg::find_first_pair_composite(dt.trace, dt.configs)) {
            std::cout << "COMPOSITE i=" << v->i << " j=" << v->j
                      << " a=" << mlpg::term_str(dt.configs[v->i])
                      << " b=" << mlpg::term_str(dt.configs[v->j]) << "\n";
        } else {
            std::cout << "NONE\n";
        }
    }
    return exit_ok;
}

int cmd_scp(const std::string& path, const std::string& entry_text,
            const std::string& whistle, const std::string& emit, const std::string& out,
            std::size_t max_nodes) {
    mlpg::program_bundle b = mlpg::load_program_bundle(path);
    mlpg::term_ptr entry = entry_text.empty() ? b.entry : mlpg::parse_term(entry_text);
    if (!entry) throw std::runtime_error("no entry term: pass --entry or an entry: line");
    mlpg::scp_options opt;
    opt.whistle = whistle == "hve"         ? mlpg::scp_whistle::hve
                  : whistle == "composite" ? mlpg::scp_whistle::composite
                                           : mlpg::scp_whistle::turchin;
    opt.max_nodes = max_nodes;
    mlpg::scp_result r = mlpg::supercompile(b.program, entry, opt);
    sink s(out);
    if (emit == "tree") mlpg::emit_tree(r, s.out());
    else if (emit == "dot") mlpg::emit_dot(r, s.out());
    else s.out() << mlpg::to_string(r.residual);
    if (!r.closed) {
        std::cerr << "node budget exhausted after " << r.nodes_used << " nodes\n";
        return exit_budget;
    }
    return exit_ok;
}

int cmd_construct(const std::string& kind, const std::string& path, std::size_t steps,
                  std::size_t max_len, unsigned seed, const std::string& out) {
    sink s(out);
    if (kind == "explang") {
        s.out() << mlpg::to_string(mlpg::explang_grammar());
        return exit_ok;
    }
    if (kind == "random-mlpg") {
        std::mt19937 rng(seed);
        s.out() << mlpg::to_string(mlpg::random_alphabetic_mlpg(rng));
        return exit_ok;
    }
    if (kind == "tm") {
        mlpg::turing_machine tm = mlpg::load_tm_file(path);
        s.out() << mlpg::to_string(mlpg::tm_to_mlpg(tm, tm.input));
        if (steps > 0) {
            mlpg::bisim_report rep = mlpg::bisimulate(tm, tm.input, steps);
            s.out() << "# bisimulation: " << rep.steps_checked << " steps, "
                    << (rep.agreed ? "agreed" : "MISMATCH: " + rep.detail)
                    << (rep.both_halted ? ", both halted" : "") << "\n";
            if (!rep.agreed) return exit_domain;
        }
        return exit_ok;
    }
    if (kind == "cfg") {
        mlpg::cfg c = mlpg::binarize_gnf(mlpg::load_cfg_file(path));
        mlpg::mlpg_grammar g = mlpg::cfg_to_mlpg(c);
        s.out() << mlpg::to_string(g);
        if (max_len > 0) {
            std::set<std::string> want = mlpg::cfg_language(c, max_len);
            want.erase("");
            mlpg::language_result got = mlpg::enumerate_language(g, max_len, 500000);
            s.out() << "# language@" << max_len << ": "
                    << (got.words == want ? "agrees with the derivation enumerator"
                                          : "MISMATCH")
                    << "\n";
            if (got.words != want) return exit_domain;
        }
        return exit_ok;
    }
    throw std::runtime_error("unknown construction '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-layer prefix grammar toolkit"};
    app.require_subcommand(1);

    std::string file, entry, out;
    std::string policy = "ordered", relation = "turchin", emit = "residual";
    std::string kind;
    std::size_t steps = 16, max_len = 16, budget = 100000, max_nodes = 512;
    unsigned jobs = 1, seed = 0;

    CLI::App* pg = app.add_subcommand("pg-run", "run a plain prefix grammar trace");
    pg->add_option("file", file)->required();
    pg->add_option("--steps", steps, "word budget, counting the initial word");

    CLI::App* mr = app.add_subcommand("mlpg-run", "run a multi-layer grammar");
    mr->add_option("file", file)->required();
    mr->add_option("--steps", steps, "word budget, counting the initial word");
    mr->add_option("--policy", policy)->check(CLI::IsMember({"ordered", "all"}));
    mr->add_option("--jobs", jobs);

    CLI::App* ml = app.add_subcommand("mlpg-lang", "enumerate a grammar's language");
    ml->add_option("file", file)->required();
    ml->add_option("--max-len", max_len);
    ml->add_option("--steps", budget, "node expansion budget");
    ml->add_option("--jobs", jobs);

    CLI::App* wh = app.add_subcommand("whistle", "detect the first whistle pair");
    wh->add_option("file", file)->required();
    wh->add_option("--relation,--whistle", relation)
        ->check(CLI::IsMember({"turchin", "hve", "composite"}));
    wh->add_option("--entry", entry, "entry term for program inputs");
    wh->add_option("--steps", steps, "trace word budget");

    CLI::App* sc = app.add_subcommand("scp", "supercompile a program");
    sc->add_option("file", file)->required();
    sc->add_option("--entry", entry);
    sc->add_option("--whistle,--relation", relation)
        ->check(CLI::IsMember({"turchin", "hve", "composite"}));
    sc->add_option("--emit", emit)->check(CLI::IsMember({"residual", "tree", "dot"}));
    sc->add_option("--out", out);
    sc->add_option("--max-nodes", max_nodes);

    CLI::App* co = app.add_subcommand("construct", "build a grammar from a machine");
    co->add_option("kind", kind)->required()
        ->check(CLI::IsMember({"tm", "cfg", "explang", "random-mlpg"}));
    co->add_option("file", file);
    co->add_option("--steps", steps, "bisimulation steps for tm (0 skips)");
    co->add_option("--max-len", max_len, "language cross-check length for cfg (0 skips)");
    co->add_option("--seed", seed);
    co->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (pg->parsed()) return cmd_pg_run(file, steps);
        if (mr->parsed()) return cmd_mlpg_run(file, steps, policy);
        if (ml->parsed()) return cmd_mlpg_lang(file, max_len, budget, jobs);
        if (wh->parsed()) return cmd_whistle(file, relation, entry, steps);
        if (sc->parsed()) return cmd_scp(file, entry, relation, emit, out, max_nodes);
        if (co->parsed()) return cmd_construct(kind, file, steps, max_len, seed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_domain;
    }
    return exit_ok;
}
