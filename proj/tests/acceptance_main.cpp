// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
// argv[1] must be the path to the command-line binary (criterion 8 runs it).

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "crashsched/analysis.hpp"
#include "crashsched/core.hpp"
#include "crashsched/engine.hpp"
#include "crashsched/fuzz.hpp"
#include "crashsched/offline.hpp"
#include "crashsched/schedulers.hpp"

using namespace crashsched;
namespace fs = std::filesystem;

namespace {

std::string g_cliBinary;
std::map<SchedulerKind, FuzzResult> g_fuzzResults; // criteria 3-5 stash, reused by 7

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
};

#define EXPECT(cond, msg)                                                                          \
    do {                                                                                           \
        if (!(cond)) {                                                                             \
            outcome.ok = false;                                                                    \
            outcome.detail << " [" << msg << "]";                                                  \
        }                                                                                          \
    } while (0)

// Independent oracle: the smallest g >= 0 whose g short tasks plus the long
// one fit into the speedup-adjusted window, found by linear scan.
std::optional<std::int64_t> gamma_scan(std::int64_t lmin, std::int64_t lmax,
                                       const Rational& speedup, std::int64_t cap) {
    for (std::int64_t g = 0; g <= cap; ++g)
        if (Rational(g * lmin + lmax) <= speedup * Rational((g + 1) * lmin)) return g;
    return std::nullopt;
}

Outcome criterion1() {
    Outcome outcome;
    std::int64_t checked = 0;
    for (std::int64_t lmax = 1; lmax <= 12 && outcome.ok; ++lmax) {
        for (std::int64_t lmin = 1; lmin <= lmax && outcome.ok; ++lmin) {
            for (std::int64_t q = 1; q <= 10 && outcome.ok; ++q) {
                for (std::int64_t p = q + 1; p <= 13 * q && outcome.ok; ++p) {
                    Rational s(p, q);
                    std::int64_t g = gamma_value(lmin, lmax, s);
                    auto scanned = gamma_scan(lmin, lmax, s, 2048);
                    EXPECT(scanned && g == *scanned, "gamma(" << lmin << "," << lmax << ","
                                                              << s.str() << ")=" << g
                                                              << " scan=" << (scanned ? *scanned : -1));
                    // fits: g shorts plus the long within the speedup window
                    EXPECT(Rational(g * lmin + lmax) <= s * Rational((g + 1) * lmin),
                           "property 1 fails at " << lmin << "," << lmax << "," << s.str());
                    // minimal: one fewer short does not fit
                    if (g >= 1)
                        EXPECT(Rational((g - 1) * lmin + lmax) > s * Rational(g * lmin),
                               "property 2 fails at " << lmin << "," << lmax << "," << s.str());
                    ++checked;
                }
            }
        }
    }
    outcome.detail << " " << checked << " grid points";
    return outcome;
}

Outcome criterion2() {
    Outcome outcome;
    struct Setup {
        std::int64_t lmin, lmax;
        Rational speedup;
    };
    const Setup setups[] = {{1, 2, Rational(6, 5)}, {1, 5, Rational(3, 2)}};
    const SchedulerKind kinds[] = {SchedulerKind::Lis, SchedulerKind::LargestFirst};
    const int phases = 200;

    for (const auto& setup : setups) {
        std::int64_t beta = ceil_div(setup.lmax, setup.lmin);
        for (auto kind : kinds) {
            AdversaryRun run =
                lower_bound_adversary(kind, setup.lmin, setup.lmax, setup.speedup, phases, beta);
            std::string tag = std::string(scheduler_name(kind)) + "@" + setup.speedup.str();

            auto problems = verify_adversary_run(run);
            EXPECT(problems.empty(), tag << " checker: "
                                         << (problems.empty() ? "" : problems.front()));
            EXPECT(static_cast<int>(run.phases.size()) == phases, tag << " phase count");
            for (const auto& ph : run.phases)
                EXPECT(ph.offPendingAtStart == run.gamma + 1,
                       tag << " phase " << ph.index << " off pending " << ph.offPendingAtStart);

            auto costs = run.pattern.task_map();
            for (const auto& r : run.algTrace.reports)
                EXPECT(costs.at(r.task).cost != setup.lmax,
                       tag << " informed a long task at " << r.time.str());

            // pending divergence at least phases/(M+1) with M = floor(s*lmax/lmin)
            std::int64_t m = (setup.speedup * Rational(setup.lmax, setup.lmin)).floor();
            EXPECT(run.algFinalPending * (m + 1) >= phases,
                   tag << " final pending " << run.algFinalPending << " with M=" << m);
            EXPECT(run.offFinalPending <= run.gamma + 1, tag << " off final");
        }
    }
    return outcome;
}

Outcome fuzz_criterion(SchedulerKind kind) {
    Outcome outcome;
    FuzzOptions options;
    options.scheduler = kind;
    options.maxN = 2;
    options.maxTasks = 8;
    options.trials = 500;
    options.seed = 42;

    FuzzResult result = fuzz_run(options);
    g_fuzzResults[kind] = result;
    EXPECT(result.trialsRun == options.trials, "ran " << result.trialsRun << " trials");
    if (result.firstViolation) {
        const auto& v = *result.firstViolation;
        outcome.ok = false;
        outcome.detail << " [violation at trial " << v.trial << ":";
        for (const auto& r : v.reports)
            if (!r.holds) outcome.detail << " " << r.bound;
        if (v.incidents > 0) outcome.detail << " incidents=" << v.incidents;
        outcome.detail << "]";
    } else {
        outcome.detail << " 500 trials clean";
    }
    return outcome;
}

Outcome criterion6() {
    Outcome outcome;
    std::int64_t agreed = 0;
    std::vector<std::int64_t> values;
    // non-decreasing multisets with 2..6 values summing to at most 24
    std::function<void(std::int64_t, std::int64_t)> extend = [&](std::int64_t low,
                                                                 std::int64_t left) {
        if (values.size() >= 2) {
            bool viaScheduling = solve_partition_via_scheduling(values);
            bool direct = subset_sum_partitionable(values);
            if (viaScheduling != direct) {
                outcome.ok = false;
                std::ostringstream set;
                for (auto v : values) set << v << " ";
                outcome.detail << " [disagreement on {" << set.str() << "}]";
                return;
            }
            ++agreed;
        }
        if (values.size() == 6) return;
        for (std::int64_t v = low; v <= left && outcome.ok; ++v) {
            values.push_back(v);
            extend(v, left - v);
            values.pop_back();
        }
    };
    extend(1, 24);
    outcome.detail << " " << agreed << " instances agree";
    return outcome;
}

Outcome criterion7() {
    Outcome outcome;
    for (auto kind : {SchedulerKind::Lis, SchedulerKind::Burst, SchedulerKind::Laf}) {
        auto it = g_fuzzResults.find(kind);
        if (it == g_fuzzResults.end()) {
            outcome.ok = false;
            outcome.detail << " [no fuzz result for " << scheduler_name(kind) << "]";
            continue;
        }
        EXPECT(it->second.totalIncidents == 0,
               scheduler_name(kind) << " traces had " << it->second.totalIncidents
                                         << " incidents");
    }

    // positive control: nine tasks keep the whole list at the threshold while
    // two processors both run task 1 over the same span
    AdversarialPattern pat;
    pat.params = {2, Rational(1), 1, 1, 2};
    for (int i = 1; i <= 9; ++i)
        pat.events.push_back(AdversaryEvent::make_inject(Rational(0), {i, Rational(0), 1}));
    RunTrace control;
    control.pattern = pat;
    for (int i = 1; i <= 9; ++i)
        control.samples.push_back({Rational(0), TraceEventKind::Inject, -1, i, i, i});
    control.samples.push_back({Rational(1), TraceEventKind::Inform, 1, 1, 8, 8});
    control.samples.push_back({Rational(1), TraceEventKind::Inform, 2, 1, 8, 8});
    control.reports.push_back({Rational(1), 1, 1, Rational(0)});
    control.reports.push_back({Rational(1), 2, 1, Rational(0)});
    auto incidents = redundancy_audit(control, AuditClass::WholeList, 8);
    EXPECT(incidents.size() == 1, "positive control found " << incidents.size() << " incidents");
    return outcome;
}

int run_command(const std::string& args, const fs::path& dir, const std::string& stdoutName) {
    fs::create_directories(dir);
    std::string cmd = g_cliBinary + " " + args + " > " + (dir / stdoutName).string() + " 2>&1";
    return std::system(cmd.c_str());
}

Outcome criterion8() {
    Outcome outcome;
    if (g_cliBinary.empty() || !fs::exists(g_cliBinary)) {
        outcome.ok = false;
        outcome.detail << " [pass the cli binary path as argv[1]]";
        return outcome;
    }

    fs::path root = fs::temp_directory_path() / "crashsched_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    // a reusable pattern file for the commands that need one
    AdversarialPattern pat;
    pat.params = {1, Rational(2), 1, 2, 2};
    pat.events.push_back(AdversaryEvent::make_inject(Rational(0), {1, Rational(0), 2}));
    pat.events.push_back(AdversaryEvent::make_inject(Rational(0), {2, Rational(0), 1}));
    pat.events.push_back(AdversaryEvent::make_crash(Rational(1), 1));
    pat.events.push_back(AdversaryEvent::make_restart(Rational(2), 1));
    fs::path patFile = root / "pattern.json";
    save_pattern(pat, patFile.string());

    struct Command {
        std::string name;
        std::function<std::string(const fs::path&)> args; // per-run output dir
    };
    const std::vector<Command> commands = {
        {"fuzz",
         [](const fs::path&) { return std::string("fuzz --scheduler lis --trials 40 --seed 7"); }},
        {"adversary",
         [](const fs::path& d) {
             return "adversary --scheduler lis --lmin 1 --lmax 2 --speedup 6/5 --phases 12 "
                    "--beta 2 --out-dir " +
                    (d / "adv").string();
         }},
        {"reduce",
         [](const fs::path& d) {
             return "reduce-partition --set 3,5,8,10 --out " + (d / "p.json").string() +
                    " --sidecar " + (d / "s.json").string() + " --solve";
         }},
        {"opt",
         [patFile](const fs::path& d) {
             return "opt --pattern " + patFile.string() + " --checkpoint 5 --omega 0 --out-witness " +
                    (d / "w.json").string();
         }},
        {"simulate",
         [patFile](const fs::path& d) {
             return "simulate --pattern " + patFile.string() +
                    " --scheduler lis --horizon 6 --record-every 1/2 --out " +
                    (d / "t.csv").string();
         }},
        {"verify",
         [patFile](const fs::path&) {
             return "verify --pattern " + patFile.string() + " --scheduler lis";
         }},
    };

    for (const auto& command : commands) {
        fs::path dirA = root / (command.name + "_a");
        fs::path dirB = root / (command.name + "_b");
        int codeA = run_command(command.args(dirA), dirA, "stdout.txt");
        int codeB = run_command(command.args(dirB), dirB, "stdout.txt");
        EXPECT(codeA == codeB, command.name << " exit codes differ");

        // compare every file the two runs produced, including the stdout capture
        std::vector<fs::path> relative;
        for (const auto& entry : fs::recursive_directory_iterator(dirA))
            if (entry.is_regular_file()) relative.push_back(fs::relative(entry.path(), dirA));
        std::size_t countB = 0;
        for (const auto& entry : fs::recursive_directory_iterator(dirB))
            if (entry.is_regular_file()) ++countB;
        EXPECT(relative.size() == countB, command.name << " file sets differ");
        for (const auto& rel : relative) {
            fs::path other = dirB / rel;
            if (!fs::exists(other)) {
                outcome.ok = false;
                outcome.detail << " [" << command.name << " missing " << rel.string() << "]";
                continue;
            }
            std::string a = read_file((dirA / rel).string());
            std::string b = read_file(other.string());
            EXPECT(a == b, command.name << " differs in " << rel.string());
            EXPECT(!a.empty() || rel.filename() != "stdout.txt",
                   command.name << " produced no output");
        }
    }
    return outcome;
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cliBinary = argv[1];

    struct Entry {
        int index;
        const char* label;
        std::function<Outcome()> run;
        double limitSeconds;
    };
    const std::vector<Entry> entries = {
        {1, "gamma grid matches the scan oracle and its two properties", criterion1, 5.0},
        {2, "200 adversary phases diverge with the offline side pinned", criterion2, 10.0},
        {3, "lis fuzz: 500 trials hold both additive bounds", [] { return fuzz_criterion(SchedulerKind::Lis); }, 120.0},
        {4, "burst fuzz: 500 trials hold task, cost and long-backlog bounds", [] { return fuzz_criterion(SchedulerKind::Burst); }, 120.0},
        {5, "laf fuzz: 500 trials hold the cost bound", [] { return fuzz_criterion(SchedulerKind::Laf); }, 120.0},
        {6, "partition via scheduling agrees with subset-sum everywhere", criterion6, 60.0},
        {7, "zero redundancy incidents in fuzz traces; control trips once", criterion7, 60.0},
        {8, "identical flags and seed give byte-identical outputs", criterion8, 120.0},
    };

    bool allPass = true;
    for (const auto& entry : entries) {
        auto begin = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = entry.run();
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.detail << " [exception: " << e.what() << "]";
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
        bool withinBudget = seconds < entry.limitSeconds;
        bool pass = outcome.ok && withinBudget;
        allPass = allPass && pass;
        std::cout << "criterion " << entry.index << " (" << entry.label << "): "
                  << (pass ? "PASS" : "FAIL") << outcome.detail.str();
        if (!withinBudget) std::cout << " [over budget " << entry.limitSeconds << "s]";
        std::cout << " [" << seconds << "s]" << std::endl;
    }
    return allPass ? 0 : 1;
}
