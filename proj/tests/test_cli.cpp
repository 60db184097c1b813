#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mlpg/supercompile.hpp"

#include <cstdio>
#include <string>
#include <sys/wait.h>

using namespace mlpg;

namespace {

struct cli_run {
    int exit_code = -1;
    std::string out;
};

cli_run run_cli(const std::string& args) {
    std::string cmd = std::string(CLI_BIN) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    cli_run r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string sample(const char* name) { return std::string(SAMPLES_DIR) + "/" + name; }

} // namespace

TEST_CASE("pg-run prints the rewriting sequence") {
    cli_run r = run_cli("pg-run " + sample("log2_cbv.pg") + " --steps 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "hf -> gf -> hf\n");
}

TEST_CASE("mlpg-lang prints the language with long runs abbreviated") {
    cli_run r = run_cli("mlpg-lang " + sample("explang.mlpg") + " --max-len 16");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "bb bbbb bbbbbbbb b^16\n");
}

TEST_CASE("mlpg-run walks the ordered trace") {
    cli_run r = run_cli("mlpg-run " + sample("explang.mlpg") + " --steps 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("a $ bb\n", 0) == 0);
    CHECK(r.out.find("bba\n") != std::string::npos);
}

TEST_CASE("whistle reports the first stack pair of a driven program") {
    cli_run r = run_cli("whistle " + sample("log2.l") + " --steps 5");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "hf, f, gf, ghf, hhf\n"
                   "TURCHIN i=2 j=3 top=g mid=h ctx=f\n");
}

TEST_CASE("whistle composite needs the longer window") {
    cli_run shortr = run_cli("whistle " + sample("log2.l") + " --steps 5 --relation composite");
    CHECK(shortr.exit_code == 0);
    CHECK(shortr.out.find("NONE") != std::string::npos);
    cli_run r = run_cli("whistle " + sample("log2.l") + " --steps 6 --relation composite");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("COMPOSITE i=0 j=5") != std::string::npos);
}

TEST_CASE("whistle on a plain grammar file") {
    cli_run r = run_cli("whistle " + sample("log2_cbv.pg") + " --steps 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "hf, gf, hf\n"
                   "TURCHIN i=0 j=2 top=h mid= ctx=f\n");
}

TEST_CASE("scp emits the composite-whistle residual") {
    cli_run r = run_cli("scp " + sample("log2.l") + " --whistle composite --emit residual");
    CHECK(r.exit_code == 0);
    program_l got = parse_program_l(r.out, true);
    CHECK(got.rules.size() == 7);
    program_l want = parse_program_l("f1(0) = 0;\n"
                                     "f1(1) = 1;\n"
                                     "f1(2) = 1;\n"
                                     "f1(x+1+1+1) = f1(g1(x)+1)+1;\n"
                                     "g1(0) = 0;\n"
                                     "g1(1) = 0;\n"
                                     "g1(x+1+1) = g1(x)+1;\n",
                                     true);
    CHECK(program_isomorphic(got, got.rules[0].fname, want, "f1"));
}

TEST_CASE("scp accepts an explicit entry and stays deterministic") {
    std::string args = "scp " + sample("log2.l") + " --entry \"f(h(x))\" --whistle turchin";
    cli_run a = run_cli(args);
    cli_run b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(parse_program_l(a.out, true).rules.size() == 7);
}

TEST_CASE("construct rebuilds grammars and cross-checks them") {
    cli_run tm = run_cli("construct tm " + sample("increment.tm") + " --steps 40");
    CHECK(tm.exit_code == 0);
    CHECK(tm.out.find("# bisimulation:") != std::string::npos);
    CHECK(tm.out.find("agreed") != std::string::npos);

    cli_run cfg = run_cli("construct cfg " + sample("anbn.cfg") + " --max-len 10");
    CHECK(cfg.exit_code == 0);
    CHECK(cfg.out.find("# language@10: agrees") != std::string::npos);

    cli_run ex = run_cli("construct explang");
    CHECK(ex.exit_code == 0);
    CHECK(ex.out.find("rule r3") != std::string::npos);

    cli_run rnd = run_cli("construct random-mlpg --seed 7");
    CHECK(rnd.exit_code == 0);
    cli_run rnd2 = run_cli("construct random-mlpg --seed 7");
    CHECK(rnd.out == rnd2.out);
}

TEST_CASE("domain errors exit with code 1") {
    cli_run r = run_cli("pg-run " + sample("missing.pg"));
    CHECK(r.exit_code == 1);
    cli_run bad = run_cli("whistle " + sample("log2_cbv.pg") + " --relation composite");
    CHECK(bad.exit_code == 1);  // plain files only support the stack relation
}

TEST_CASE("budget exhaustion exits with code 2") {
    cli_run r = run_cli("scp " + sample("log2.l") + " --max-nodes 4");
    CHECK(r.exit_code == 2);
}
