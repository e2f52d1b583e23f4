#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crashsched/cli.hpp"
#include "crashsched/core.hpp"
#include "crashsched/offline.hpp"
#include "helpers.hpp"

using namespace crashsched;
using namespace testutil;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    static int counter = 0;
    fs::path dir = fs::temp_directory_path() / ("crashsched_cli_" + std::to_string(++counter));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_sample_pattern(const fs::path& dir) {
    auto pat = pattern(params(1, Rational(2), 1, 2, 2),
                       {inject(Rational(0), 1, 2), inject(Rational(0), 2, 1)});
    fs::path file = dir / "pattern.json";
    save_pattern(pat, file.string());
    return file.string();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"definitely-not-a-command"}).code == 2);
    CHECK(cli({"verify"}).code == 2);            // missing required options
    CHECK(cli({"simulate"}).code == 2);          // neither --pattern nor --config
    auto dir = scratch_dir();
    auto patFile = write_sample_pattern(dir);
    CHECK(cli({"simulate", "--pattern", patFile, "--config", patFile}).code == 2);
    CHECK(cli({"simulate", "--pattern", patFile, "--scheduler", "lis"}).code == 2); // no horizon
    CHECK(cli({"simulate", "--pattern", patFile, "--horizon", "5"}).code == 2);     // no scheduler
}

TEST_CASE("help exits 0 and lists the subcommands") {
    auto run = cli({"--help"});
    CHECK(run.code == 0);
    for (const char* name : {"simulate", "adversary", "opt", "reduce-partition", "verify", "fuzz"})
        CHECK(contains(run.out, name));
}

TEST_CASE("simulate prints final pendings and writes the trace") {
    auto dir = scratch_dir();
    auto patFile = write_sample_pattern(dir);
    fs::path traceFile = dir / "trace.csv";

    auto run = cli({"simulate", "--pattern", patFile, "--scheduler", "lis", "--horizon", "5",
                    "--out", traceFile.string()});
    CHECK(run.code == 0);
    CHECK(run.out == "final_pending_tasks=0\nfinal_pending_cost=0\n");
    std::string csv = read_file(traceFile.string());
    CHECK(contains(csv, "time,event,proc,task,pending_tasks,pending_cost\n"));
    CHECK(contains(csv, "inject"));
    CHECK(contains(csv, "inform"));

    // a config file bundling the same run gives the same answer
    fs::path cfgFile = dir / "config.json";
    write_file(cfgFile.string(),
               std::string("{\"pattern_file\":\"") + patFile +
                   "\",\"scheduler\":{\"kind\":\"lis\"},\"horizon\":5}");
    auto cfgRun = cli({"simulate", "--config", cfgFile.string()});
    CHECK(cfgRun.code == 0);
    CHECK(cfgRun.out == run.out);
}

TEST_CASE("simulate validates its inputs") {
    auto dir = scratch_dir();
    auto patFile = write_sample_pattern(dir);
    CHECK(cli({"simulate", "--pattern", patFile, "--scheduler", "fifo", "--horizon", "5"}).code == 2);
    CHECK(cli({"simulate", "--pattern", patFile, "--scheduler", "lis", "--horizon", "-1"}).code == 2);
    fs::path cfgFile = dir / "broken.json";
    write_file(cfgFile.string(), "{not json");
    auto run = cli({"simulate", "--config", cfgFile.string()});
    CHECK(run.code == 2);
    CHECK_FALSE(run.err.empty());
}

TEST_CASE("reduce-partition decides instances and writes the encoding") {
    CHECK(cli({"reduce-partition", "--set", "1,2,3", "--solve"}).code == 0);
    CHECK(cli({"reduce-partition", "--set", "1,2,3", "--solve"}).out == "TRUE\n");
    auto no = cli({"reduce-partition", "--set", "2,3,3", "--solve"});
    CHECK(no.code == 1);
    CHECK(no.out == "FALSE\n");

    CHECK(cli({"reduce-partition", "--set", "1,0,3", "--solve"}).code == 2);
    CHECK(cli({"reduce-partition", "--set", "1,2,x", "--solve"}).code == 2);
    CHECK(cli({"reduce-partition", "--set", "1,2,3"}).code == 2); // nothing to do
    CHECK(cli({"reduce-partition", "--set", "1,2,3", "--out", "p.json"}).code == 2); // no sidecar

    auto dir = scratch_dir();
    fs::path patFile = dir / "encoded.json";
    fs::path sideFile = dir / "sidecar.json";
    auto run = cli({"reduce-partition", "--set", "1,2,3", "--out", patFile.string(), "--sidecar",
                    sideFile.string()});
    CHECK(run.code == 0);
    auto encoded = load_pattern(patFile.string());
    CHECK(encoded.params.n == 1);
    CHECK(encoded.tasks().size() == 3);
    std::string side = read_file(sideFile.string());
    CHECK(contains(side, "\"checkpoint\": \"7\""));
    CHECK(contains(side, "\"omega\": 0"));
}

TEST_CASE("opt answers the encoded partition question") {
    auto dir = scratch_dir();
    fs::path patFile = dir / "encoded.json";
    fs::path sideFile = dir / "sidecar.json";
    REQUIRE(cli({"reduce-partition", "--set", "1,2,3", "--out", patFile.string(), "--sidecar",
                 sideFile.string()})
                .code == 0);

    fs::path witnessFile = dir / "witness.json";
    auto run = cli({"opt", "--pattern", patFile.string(), "--checkpoint", "7", "--omega", "0",
                    "--out-witness", witnessFile.string()});
    CHECK(run.code == 0);
    CHECK(run.out == "min_pending_cost=0\nmin_pending_tasks=0\nTRUE\n");
    std::string witness = read_file(witnessFile.string());
    CHECK(contains(witness, "\"cost_witness\""));
    CHECK(contains(witness, "\"task_witness\""));

    // tightening the checkpoint leaves work pending and flips the decision
    auto early = cli({"opt", "--pattern", patFile.string(), "--checkpoint", "5", "--omega", "0"});
    CHECK(early.code == 1);
    CHECK(contains(early.out, "FALSE"));

    CHECK(cli({"opt", "--pattern", patFile.string(), "--checkpoint", "7", "--omega", "1/2"}).code == 2);
    CHECK(cli({"opt", "--pattern", patFile.string(), "--checkpoint", "7", "--omega", "-1"}).code == 2);
}

TEST_CASE("opt enforces the search budget") {
    auto dir = scratch_dir();
    std::vector<AdversaryEvent> events;
    for (int i = 1; i <= 13; ++i) events.push_back(inject(Rational(0), i, 1));
    auto big = pattern(params(1, Rational(1), 1, 1, 1), events);
    fs::path patFile = dir / "big.json";
    save_pattern(big, patFile.string());
    auto run = cli({"opt", "--pattern", patFile.string(), "--checkpoint", "20"});
    CHECK(run.code == 3);
    CHECK_FALSE(run.err.empty());
}

TEST_CASE("verify emits one report line per bound plus the audit count") {
    auto dir = scratch_dir();
    auto patFile = write_sample_pattern(dir);
    auto run = cli({"verify", "--pattern", patFile, "--scheduler", "lis"});
    CHECK(run.code == 0);
    std::istringstream lines(run.out);
    std::string line;
    int reportLines = 0;
    std::string last;
    while (std::getline(lines, line)) {
        if (contains(line, "\"bound\":\"lis-")) ++reportLines;
        last = line;
    }
    CHECK(reportLines == 2);
    CHECK(last == "incidents=0");
    CHECK(contains(run.out, "\"reference\":\"witness-exact\""));
}

TEST_CASE("verify against an explicit reference schedule") {
    auto dir = scratch_dir();
    auto patFile = write_sample_pattern(dir);
    fs::path refFile = dir / "reference.json";
    write_file(refFile.string(),
               "[{\"proc\":1,\"task\":1,\"start\":\"0\"},{\"proc\":1,\"task\":2,\"start\":\"2\"}]");
    auto run = cli({"verify", "--pattern", patFile, "--scheduler", "lis", "--reference",
                    refFile.string()});
    CHECK(run.code == 0);
    CHECK(contains(run.out, "\"reference\":\"replay\""));

    write_file(refFile.string(), "[{\"proc\":1,\"task\":99,\"start\":\"0\"}]");
    CHECK(cli({"verify", "--pattern", patFile, "--scheduler", "lis", "--reference",
               refFile.string()})
              .code == 2);
}

TEST_CASE("fuzz is seeded and reproducible") {
    auto one = cli({"fuzz", "--scheduler", "lis", "--trials", "5", "--seed", "42"});
    auto two = cli({"fuzz", "--scheduler", "lis", "--trials", "5", "--seed", "42"});
    CHECK(one.code == 0);
    CHECK(one.out == two.out);
    CHECK(contains(one.out, "trials=5 violations=0"));

    auto other = cli({"fuzz", "--scheduler", "lis", "--trials", "5", "--seed", "43"});
    CHECK(other.code == 0); // different stream, same verdict

    CHECK(cli({"fuzz", "--scheduler", "lis", "--trials", "1", "--n", "3"}).code == 3);
    CHECK(cli({"fuzz", "--scheduler", "lis", "--trials", "1", "--tasks", "9"}).code == 3);
}

TEST_CASE("adversary writes traces and a phase log deterministically") {
    auto dir = scratch_dir();
    fs::path outA = dir / "a";
    fs::path outB = dir / "b";
    std::vector<std::string> base{"adversary", "--scheduler", "lis",    "--lmin",   "1",
                                  "--lmax",    "2",           "--speedup", "6/5",   "--phases",
                                  "3"};
    auto argsFor = [&](const fs::path& d) {
        auto args = base;
        args.push_back("--out-dir");
        args.push_back(d.string());
        return args;
    };
    auto runA = cli(argsFor(outA));
    auto runB = cli(argsFor(outB));
    CHECK(runA.code == 0);
    CHECK(runA.out == runB.out);
    CHECK(contains(runA.out, "phase 1: scenario="));
    CHECK(contains(runA.out, "gamma=4"));
    for (const char* name : {"alg_trace.csv", "off_trace.csv", "phase_log.csv"}) {
        CHECK(fs::exists(outA / name));
        CHECK(read_file((outA / name).string()) == read_file((outB / name).string()));
    }
    std::string phaseLog = read_file((outA / "phase_log.csv").string());
    CHECK(contains(phaseLog, "phase,scenario,kappa,alg_pending,off_pending\n"));

    // a competitive speedup is outside the adversary's range
    auto bad = argsFor(dir / "c");
    bad[8] = "2";
    CHECK(cli(bad).code == 2);
}
