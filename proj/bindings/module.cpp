#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "crashsched/analysis.hpp"
#include "crashsched/cli.hpp"
#include "crashsched/core.hpp"
#include "crashsched/engine.hpp"
#include "crashsched/fuzz.hpp"
#include "crashsched/offline.hpp"
#include "crashsched/schedulers.hpp"

namespace py = pybind11;

namespace {

using namespace crashsched;

RunTrace simulate_from_json(const std::string& patternJson,
                            const std::string& scheduler,
                            const std::string& horizon,
                            std::int64_t beta,
                            const std::string& recordEvery,
                            std::int64_t budget) {
    SimulationConfig cfg;
    cfg.pattern = pattern_from_json(patternJson);
    if (beta != 0) cfg.pattern.params.beta = beta;
    cfg.scheduler.kind = scheduler_kind_from_name(scheduler);
    cfg.horizon = horizon.empty()
                      ? cfg.pattern.last_event_time().value_or(Rational(0)) +
                            Rational(cfg.pattern.total_cost() + 1)
                      : Rational::parse(horizon);
    if (!recordEvery.empty()) cfg.recordEvery = Rational::parse(recordEvery);
    if (budget != 0) cfg.eventBudget = budget;
    return run_simulation(cfg);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "deterministic crash/restart scheduling simulator and verifier";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const validation_error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const precondition_error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def(
        "gamma",
        [](std::int64_t lmin, std::int64_t lmax, const std::string& speedup) {
            return gamma_value(lmin, lmax, Rational::parse(speedup));
        },
        py::arg("lmin"), py::arg("lmax"), py::arg("speedup"));

    m.def(
        "non_competitive",
        [](std::int64_t lmin, std::int64_t lmax, const std::string& speedup) {
            return non_competitive_check(lmin, lmax, Rational::parse(speedup));
        },
        py::arg("lmin"), py::arg("lmax"), py::arg("speedup"));

    m.def(
        "sufficient_speedup",
        [](std::int64_t lmin, std::int64_t lmax) {
            SufficientSpeedup s = sufficient_speedup(lmin, lmax);
            py::dict out;
            out["speedup"] = s.speedup.str();
            out["speedup_value"] = s.speedup.to_double();
            out["is_rational"] = s.speedup.is_rational();
            out["non_competitive_below"] = s.nonCompetitiveBelow.str();
            return out;
        },
        py::arg("lmin"), py::arg("lmax"));

    m.def(
        "burst_min_speedup",
        [](std::int64_t lmin, std::int64_t lmax) -> py::object {
            auto s = burst_min_speedup(lmin, lmax);
            if (!s) return py::none();
            return py::str(s->str());
        },
        py::arg("lmin"), py::arg("lmax"));

    m.def(
        "validate_pattern",
        [](const std::string& patternJson) { return validate_pattern(pattern_from_json(patternJson)); },
        py::arg("pattern_json"));

    m.def(
        "simulate",
        [](const std::string& patternJson, const std::string& scheduler, const std::string& horizon,
           std::int64_t beta, const std::string& recordEvery, std::int64_t budget) {
            RunTrace trace = simulate_from_json(patternJson, scheduler, horizon, beta, recordEvery, budget);
            TimePoint end = trace.samples.empty() ? TimePoint(0) : trace.samples.back().time;
            py::dict out;
            out["trace_csv"] = trace_to_csv(trace);
            out["final_pending_tasks"] = trace.pending_tasks_at(end);
            out["final_pending_cost"] = trace.pending_cost_at(end);
            return out;
        },
        py::arg("pattern_json"), py::arg("scheduler"), py::arg("horizon") = std::string(),
        py::arg("beta") = std::int64_t{0}, py::arg("record_every") = std::string(),
        py::arg("budget") = std::int64_t{0});

    m.def(
        "opt",
        [](const std::string& patternJson, const std::string& checkpoint) {
            OptResult r = opt_brute_force(pattern_from_json(patternJson), Rational::parse(checkpoint));
            py::dict out;
            out["min_pending_cost"] = r.minPendingCost;
            out["min_pending_tasks"] = r.minPendingTasks;
            return out;
        },
        py::arg("pattern_json"), py::arg("checkpoint"));

    m.def(
        "dec_c_sched",
        [](const std::string& patternJson, const std::string& checkpoint, std::int64_t omega) {
            return dec_c_sched(pattern_from_json(patternJson), Rational::parse(checkpoint), omega);
        },
        py::arg("pattern_json"), py::arg("checkpoint"), py::arg("omega"));

    m.def(
        "dec_t_sched",
        [](const std::string& patternJson, const std::string& checkpoint, std::int64_t omega) {
            return dec_t_sched(pattern_from_json(patternJson), Rational::parse(checkpoint), omega);
        },
        py::arg("pattern_json"), py::arg("checkpoint"), py::arg("omega"));

    m.def(
        "reduce_partition",
        [](const std::vector<std::int64_t>& values) {
            ReductionInstance inst = reduce_partition(values);
            py::dict out;
            out["pattern_json"] = pattern_to_json(inst.pattern);
            out["checkpoint"] = inst.checkpoint.str();
            out["omega"] = inst.omega;
            return out;
        },
        py::arg("values"));

    m.def("solve_partition", &solve_partition_via_scheduling, py::arg("values"));
    m.def("subset_sum_partitionable", &subset_sum_partitionable, py::arg("values"));

    m.def(
        "adversary",
        [](const std::string& scheduler, std::int64_t lmin, std::int64_t lmax,
           const std::string& speedup, int phases, std::int64_t beta) {
            std::int64_t b = beta != 0 ? beta : ceil_div(lmax, lmin);
            AdversaryRun run = lower_bound_adversary(scheduler_kind_from_name(scheduler), lmin, lmax,
                                                     Rational::parse(speedup), phases, b);
            py::dict out;
            out["alg_trace_csv"] = trace_to_csv(run.algTrace);
            out["off_trace_csv"] = trace_to_csv(run.offTrace);
            out["phase_log_csv"] = phase_log_to_csv(run.phases);
            out["gamma"] = run.gamma;
            out["alg_final_pending"] = run.algFinalPending;
            out["off_final_pending"] = run.offFinalPending;
            out["problems"] = verify_adversary_run(run);
            return out;
        },
        py::arg("scheduler"), py::arg("lmin"), py::arg("lmax"), py::arg("speedup"),
        py::arg("phases"), py::arg("beta") = std::int64_t{0});

    m.def(
        "verify",
        [](const std::string& patternJson, const std::string& scheduler, const std::string& horizon,
           std::int64_t beta) {
            RunTrace trace = simulate_from_json(patternJson, scheduler, horizon, beta, std::string(), 0);
            TrialCheck check = check_trace(scheduler_kind_from_name(scheduler), trace);
            bool holds = check.incidents.empty();
            std::vector<std::string> reports;
            for (const auto& r : check.reports) {
                reports.push_back(bound_report_to_json(r));
                holds = holds && r.holds;
            }
            py::dict out;
            out["reports"] = reports;
            out["incidents"] = check.incidents.size();
            out["holds"] = holds;
            return out;
        },
        py::arg("pattern_json"), py::arg("scheduler"), py::arg("horizon") = std::string(),
        py::arg("beta") = std::int64_t{0});

    m.def(
        "fuzz",
        [](const std::string& scheduler, int n, int tasks, int trials, std::uint64_t seed) {
            FuzzOptions options;
            options.scheduler = scheduler_kind_from_name(scheduler);
            options.maxN = n;
            options.maxTasks = tasks;
            options.trials = trials;
            options.seed = seed;
            FuzzResult r = fuzz_run(options);
            py::dict out;
            out["trials"] = r.trialsRun;
            out["incidents"] = r.totalIncidents;
            out["ok"] = !r.firstViolation.has_value();
            if (r.firstViolation) {
                out["violating_trial"] = r.firstViolation->trial;
                out["violation_pattern_json"] = pattern_to_json(r.firstViolation->pattern);
            }
            return out;
        },
        py::arg("scheduler"), py::arg("n") = 2, py::arg("tasks") = 8, py::arg("trials") = 100,
        py::arg("seed") = std::uint64_t{0});

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
