#include "crashsched/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "crashsched/analysis.hpp"
#include "crashsched/core.hpp"
#include "crashsched/engine.hpp"
#include "crashsched/fuzz.hpp"
#include "crashsched/offline.hpp"
#include "crashsched/schedulers.hpp"

namespace crashsched {

namespace {

struct SimulateArgs {
    std::string pattern;
    std::string config;
    std::string scheduler;
    std::int64_t beta = 0; // 0 = keep the pattern's beta
    std::string horizon;
    std::string outFile;
    std::string recordEvery;
    std::int64_t budget = 0; // 0 = default
};

struct AdversaryArgs {
    std::string scheduler;
    std::int64_t lmin = 0;
    std::int64_t lmax = 0;
    std::string speedup;
    int phases = 0;
    std::int64_t beta = 0; // 0 = ceil(lmax/lmin)
    std::string outDir;
};

struct OptArgs {
    std::string pattern;
    std::string checkpoint;
    std::string omega; // empty = report minima only
    std::string witnessFile;
};

struct ReduceArgs {
    std::string set;
    std::string outFile;
    std::string sidecarFile;
    bool solve = false;
};

struct VerifyArgs {
    std::string pattern;
    std::string scheduler;
    std::int64_t beta = 0;
    std::string horizon;
    std::string referenceFile;
};

struct FuzzArgs {
    std::string scheduler;
    int n = 2;
    int tasks = 8;
    int trials = 100;
    std::uint64_t seed = 0;
    std::string outDir;
};

std::string witness_to_json(const OptResult& result) {
    nlohmann::ordered_json j;
    auto encode = [](const std::vector<ScheduledExec>& schedule) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& e : schedule) {
            nlohmann::ordered_json row;
            row["proc"] = e.proc;
            row["task"] = e.task;
            row["start"] = e.start.str();
            arr.push_back(row);
        }
        return arr;
    };
    j["cost_witness"] = encode(result.costWitness);
    j["task_witness"] = encode(result.taskWitness);
    return j.dump(2) + "\n";
}

std::vector<ScheduledExec> schedule_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("bad schedule JSON: ") + e.what());
    }
    if (!j.is_array()) throw validation_error("schedule JSON must be an array");
    std::vector<ScheduledExec> out;
    for (const auto& row : j) {
        if (!row.is_object() || !row.contains("proc") || !row.contains("task") || !row.contains("start"))
            throw validation_error("schedule entries need proc, task and start");
        ScheduledExec e;
        e.proc = row.at("proc").get<int>();
        e.task = row.at("task").get<std::int64_t>();
        const auto& s = row.at("start");
        e.start = s.is_string() ? Rational::parse(s.get<std::string>())
                                : Rational(s.get<std::int64_t>());
        out.push_back(e);
    }
    return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        if (item.empty()) throw validation_error("empty entry in integer list");
        std::size_t used = 0;
        std::int64_t value = 0;
        try {
            value = std::stoll(item, &used);
        } catch (const std::exception&) {
            throw validation_error("bad integer in list: " + item);
        }
        if (used != item.size()) throw validation_error("bad integer in list: " + item);
        out.push_back(value);
    }
    if (out.empty()) throw validation_error("integer list is empty");
    return out;
}

TrialCheck run_verify(SchedulerKind kind, const RunTrace& trace, const std::string& referenceFile) {
    if (referenceFile.empty()) return check_trace(kind, trace);
    auto schedule = schedule_from_json(read_file(referenceFile));
    TimePoint horizon = trace.samples.empty() ? TimePoint(0) : trace.samples.back().time;
    OfflineRun reference = run_offline_reference(trace.pattern, schedule, horizon);
    TrialCheck out;
    const auto& p = trace.pattern.params;
    switch (kind) {
    case SchedulerKind::Lis:
        out.reports = verify_lis_bounds(trace, reference.trace);
        out.incidents = redundancy_audit(trace, AuditClass::WholeList, p.beta * p.n * p.n);
        break;
    case SchedulerKind::Burst:
        out.reports = verify_burst_bounds(trace, reference.trace);
        out.incidents = redundancy_audit(trace, AuditClass::CostClass, static_cast<std::int64_t>(p.n) * p.n);
        break;
    case SchedulerKind::Laf:
        out.reports = verify_laf_bound(trace, reference.trace);
        out.incidents = redundancy_audit(trace, AuditClass::CostClass, p.beta * p.n * p.n);
        break;
    default:
        throw precondition_error("no verified bound for this scheduler");
    }
    return out;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
    AdversarialPattern pattern;
    SchedulerSpec spec;
    std::string horizonText = a.horizon;
    std::string outFile = a.outFile;
    std::string recordText = a.recordEvery;
    std::int64_t beta = a.beta;
    std::int64_t budget = a.budget;

    if (!a.config.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(read_file(a.config));
        } catch (const nlohmann::json::exception& e) {
            throw validation_error(std::string("bad config JSON: ") + e.what());
        }
        if (j.contains("pattern_file"))
            pattern = load_pattern(j.at("pattern_file").get<std::string>());
        else if (j.contains("pattern"))
            pattern = pattern_from_json(j.at("pattern").dump());
        else
            throw validation_error("config needs pattern or pattern_file");
        if (!j.contains("scheduler") || !j.at("scheduler").contains("kind"))
            throw validation_error("config needs scheduler.kind");
        spec.kind = scheduler_kind_from_name(j.at("scheduler").at("kind").get<std::string>());
        if (j.at("scheduler").contains("beta")) beta = j.at("scheduler").at("beta").get<std::int64_t>();
        if (!j.contains("horizon")) throw validation_error("config needs horizon");
        const auto& h = j.at("horizon");
        horizonText = h.is_string() ? h.get<std::string>() : std::to_string(h.get<std::int64_t>());
        if (j.contains("record_every")) {
            const auto& r = j.at("record_every");
            recordText = r.is_string() ? r.get<std::string>() : std::to_string(r.get<std::int64_t>());
        }
        if (j.contains("out")) outFile = j.at("out").get<std::string>();
        if (j.contains("event_budget")) budget = j.at("event_budget").get<std::int64_t>();
    } else {
        pattern = load_pattern(a.pattern);
        spec.kind = scheduler_kind_from_name(a.scheduler);
        if (horizonText.empty()) throw validation_error("simulate needs --horizon");
    }

    if (beta != 0) pattern.params.beta = beta;

    SimulationConfig cfg;
    cfg.pattern = std::move(pattern);
    cfg.scheduler = spec;
    cfg.horizon = Rational::parse(horizonText);
    if (!recordText.empty()) cfg.recordEvery = Rational::parse(recordText);
    if (budget != 0) cfg.eventBudget = budget;

    RunTrace trace = run_simulation(cfg);
    if (!outFile.empty()) write_file(outFile, trace_to_csv(trace));
    out << "final_pending_tasks=" << trace.pending_tasks_at(cfg.horizon) << "\n";
    out << "final_pending_cost=" << trace.pending_cost_at(cfg.horizon) << "\n";
    return 0;
}

int do_adversary(const AdversaryArgs& a, std::ostream& out, std::ostream& err) {
    SchedulerKind kind = scheduler_kind_from_name(a.scheduler);
    if (a.lmin < 1 || a.lmax < a.lmin) throw validation_error("need 1 <= lmin <= lmax");
    if (a.phases < 0) throw validation_error("phases must be non-negative");
    Rational speedup = Rational::parse(a.speedup);
    std::int64_t beta = a.beta != 0 ? a.beta : ceil_div(a.lmax, a.lmin);

    AdversaryRun run = lower_bound_adversary(kind, a.lmin, a.lmax, speedup, a.phases, beta);

    std::filesystem::create_directories(a.outDir);
    auto at = [&](const char* name) { return (std::filesystem::path(a.outDir) / name).string(); };
    write_file(at("alg_trace.csv"), trace_to_csv(run.algTrace));
    write_file(at("off_trace.csv"), trace_to_csv(run.offTrace));
    write_file(at("phase_log.csv"), phase_log_to_csv(run.phases));

    for (const auto& p : run.phases)
        out << "phase " << p.index << ": scenario=" << p.scenario << " kappa=" << p.kappa
            << " alg=" << p.algPendingAtStart << " off=" << p.offPendingAtStart
            << " delta=" << (p.algPendingAtStart - p.offPendingAtStart) << "\n";
    out << "final: alg=" << run.algFinalPending << " off=" << run.offFinalPending
        << " gamma=" << run.gamma << "\n";

    auto problems = verify_adversary_run(run);
    for (const auto& p : problems) err << "check failed: " << p << "\n";
    return problems.empty() ? 0 : 1;
}

int do_opt(const OptArgs& a, std::ostream& out) {
    AdversarialPattern pattern = load_pattern(a.pattern);
    TimePoint checkpoint = Rational::parse(a.checkpoint);
    OptResult result = opt_brute_force(pattern, checkpoint);
    out << "min_pending_cost=" << result.minPendingCost << "\n";
    out << "min_pending_tasks=" << result.minPendingTasks << "\n";
    if (!a.witnessFile.empty()) write_file(a.witnessFile, witness_to_json(result));
    if (a.omega.empty()) return 0;
    std::int64_t omega = Rational::parse(a.omega).floor();
    if (Rational(omega) != Rational::parse(a.omega)) throw validation_error("omega must be an integer");
    if (omega < 0) throw validation_error("omega must be non-negative");
    bool yes = result.minPendingCost <= omega;
    out << (yes ? "TRUE" : "FALSE") << "\n";
    return yes ? 0 : 1;
}

int do_reduce(const ReduceArgs& a, std::ostream& out) {
    if (a.outFile.empty() != a.sidecarFile.empty())
        throw validation_error("give --out and --sidecar together");
    if (a.outFile.empty() && !a.solve)
        throw validation_error("nothing to do: give --out/--sidecar or --solve");
    std::vector<std::int64_t> values = parse_int_list(a.set);
    ReductionInstance instance = reduce_partition(values);
    if (!a.outFile.empty()) {
        save_pattern(instance.pattern, a.outFile);
        nlohmann::ordered_json side;
        side["checkpoint"] = instance.checkpoint.str();
        side["omega"] = instance.omega;
        write_file(a.sidecarFile, side.dump(2) + "\n");
    }
    if (!a.solve) return 0;
    bool yes = solve_partition_via_scheduling(values);
    out << (yes ? "TRUE" : "FALSE") << "\n";
    return yes ? 0 : 1;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
    AdversarialPattern pattern = load_pattern(a.pattern);
    if (a.beta != 0) pattern.params.beta = a.beta;
    SchedulerKind kind = scheduler_kind_from_name(a.scheduler);

    SimulationConfig cfg;
    cfg.pattern = pattern;
    cfg.scheduler.kind = kind;
    cfg.horizon = a.horizon.empty()
                      ? pattern.last_event_time().value_or(Rational(0)) + Rational(pattern.total_cost() + 1)
                      : Rational::parse(a.horizon);
    RunTrace trace = run_simulation(cfg);

    TrialCheck check = run_verify(kind, trace, a.referenceFile);
    bool ok = check.incidents.empty();
    for (const auto& r : check.reports) {
        out << bound_report_to_json(r) << "\n";
        ok = ok && r.holds;
    }
    out << "incidents=" << check.incidents.size() << "\n";
    return ok ? 0 : 1;
}

int do_fuzz(const FuzzArgs& a, std::ostream& out) {
    FuzzOptions options;
    options.scheduler = scheduler_kind_from_name(a.scheduler);
    options.maxN = a.n;
    options.maxTasks = a.tasks;
    options.trials = a.trials;
    options.seed = a.seed;

    FuzzResult result = fuzz_run(options);
    if (!result.firstViolation) {
        out << "trials=" << result.trialsRun << " violations=0 incidents=" << result.totalIncidents
            << "\n";
        return 0;
    }
    const auto& v = *result.firstViolation;
    std::string dumpPath = "fuzz_violation.json";
    if (!a.outDir.empty()) {
        std::filesystem::create_directories(a.outDir);
        dumpPath = (std::filesystem::path(a.outDir) /
                    ("violation_trial_" + std::to_string(v.trial) + ".json"))
                       .string();
    }
    save_pattern(v.pattern, dumpPath);
    out << "violating_trial=" << v.trial << "\n";
    for (const auto& r : v.reports) out << bound_report_to_json(r) << "\n";
    out << "incidents=" << v.incidents << "\n";
    out << "pattern_dump=" << dumpPath << "\n";
    return 1;
}

} // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"deterministic crash/restart scheduling simulator and verifier"};
    app.name("crashsched");
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "run a scheduler over a pattern and write its trace");
    simulate->add_option("--pattern", sim.pattern, "pattern JSON file");
    simulate->add_option("--config", sim.config, "config JSON bundling pattern, scheduler and horizon");
    simulate->add_option("--scheduler", sim.scheduler, "lis|burst|laf|largest|smallest");
    simulate->add_option("--beta", sim.beta, "override the pattern's beta");
    simulate->add_option("--horizon", sim.horizon, "simulate through this instant (rational)");
    simulate->add_option("--out", sim.outFile, "trace CSV output path");
    simulate->add_option("--record-every", sim.recordEvery, "extra sample rows at these multiples");
    simulate->add_option("--budget", sim.budget, "trace row budget");

    AdversaryArgs adv;
    auto* adversary = app.add_subcommand("adversary", "build the diverging pattern for a scheduler");
    adversary->add_option("--scheduler", adv.scheduler, "lis|burst|laf|largest|smallest")->required();
    adversary->add_option("--lmin", adv.lmin, "short cost")->required();
    adversary->add_option("--lmax", adv.lmax, "long cost")->required();
    adversary->add_option("--speedup", adv.speedup, "speedup (rational)")->required();
    adversary->add_option("--phases", adv.phases, "phase count")->required();
    adversary->add_option("--beta", adv.beta, "beta (default ceil(lmax/lmin))");
    adversary->add_option("--out-dir", adv.outDir, "directory for traces and phase log")->required();

    OptArgs opt;
    auto* optCmd = app.add_subcommand("opt", "exact offline minimum at a checkpoint");
    optCmd->add_option("--pattern", opt.pattern, "pattern JSON file")->required();
    optCmd->add_option("--checkpoint", opt.checkpoint, "checkpoint instant (rational)")->required();
    optCmd->add_option("--omega", opt.omega, "decide pending cost <= omega");
    optCmd->add_option("--out-witness", opt.witnessFile, "witness schedule JSON output path");

    ReduceArgs red;
    auto* reduce = app.add_subcommand("reduce-partition", "encode a partition instance as scheduling");
    reduce->add_option("--set", red.set, "comma separated positive integers")->required();
    reduce->add_option("--out", red.outFile, "pattern JSON output path");
    reduce->add_option("--sidecar", red.sidecarFile, "checkpoint/omega JSON output path");
    reduce->add_flag("--solve", red.solve, "also decide the instance via the oracle");

    VerifyArgs ver;
    auto* verify = app.add_subcommand("verify", "simulate and check the scheduler's additive bounds");
    verify->add_option("--pattern", ver.pattern, "pattern JSON file")->required();
    verify->add_option("--scheduler", ver.scheduler, "lis|burst|laf")->required();
    verify->add_option("--beta", ver.beta, "override the pattern's beta");
    verify->add_option("--horizon", ver.horizon, "simulate through this instant (default: drain)");
    verify->add_option("--reference", ver.referenceFile, "explicit schedule JSON to compare against");

    FuzzArgs fz;
    auto* fuzz = app.add_subcommand("fuzz", "seeded random patterns vs the exact oracle");
    fuzz->add_option("--scheduler", fz.scheduler, "lis|burst|laf")->required();
    fuzz->add_option("--n", fz.n, "max processors (<= 2)");
    fuzz->add_option("--tasks", fz.tasks, "max tasks (<= 8)");
    fuzz->add_option("--trials", fz.trials, "trial count");
    fuzz->add_option("--seed", fz.seed, "seed");
    fuzz->add_option("--out-dir", fz.outDir, "directory for violation dumps");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) {
            if (sim.config.empty() == sim.pattern.empty())
                throw validation_error("give exactly one of --pattern or --config");
            if (sim.config.empty() && sim.scheduler.empty())
                throw validation_error("simulate needs --scheduler");
            return do_simulate(sim, out);
        }
        if (adversary->parsed()) return do_adversary(adv, out, err);
        if (optCmd->parsed()) return do_opt(opt, out);
        if (reduce->parsed()) return do_reduce(red, out);
        if (verify->parsed()) return do_verify(ver, out);
        if (fuzz->parsed()) return do_fuzz(fz, out);
    } catch (const budget_error& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace crashsched
