#include "crashsched/offline.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <sstream>

#include "crashsched/schedulers.hpp"

namespace crashsched {

namespace {

struct ClippedPeriod {
    int proc = 0;
    TimePoint start;
    TimePoint deadline; // completion exactly at the deadline counts
};

// Subset-feasibility solver for one checkpoint. A set of tasks fits a period
// iff packing them in arrival order (ties by id), each starting at
// max(previous finish, arrival), ends by the deadline; any feasible ordered
// schedule can be rearranged into that form without finishing later, and
// idle time never helps, so subsets are all that has to be enumerated.
class CheckpointSolver {
public:
    CheckpointSolver(const AdversarialPattern& pattern,
                     const TimePoint& checkpoint,
                     std::optional<std::int64_t> onlyCost)
        : checkpoint_(checkpoint) {
        for (const auto& t : pattern.tasks()) {
            if (t.arrival > checkpoint) continue;
            if (onlyCost && t.cost != *onlyCost) continue;
            tasks_.push_back(t);
        }
        std::stable_sort(tasks_.begin(), tasks_.end(), [](const TaskSpec& a, const TaskSpec& b) {
            if (a.arrival != b.arrival) return a.arrival < b.arrival;
            return a.id < b.id;
        });
        if (tasks_.size() > 12)
            throw budget_error("offline oracle budget: " + std::to_string(tasks_.size()) +
                               " tasks at the checkpoint, limit 12");

        auto periods = alive_periods(pattern);
        for (int p = 1; p <= pattern.params.n; ++p) {
            for (const auto& span : periods[static_cast<std::size_t>(p)]) {
                if (span.start > checkpoint) continue;
                TimePoint deadline = span.end ? min(*span.end, checkpoint) : checkpoint;
                if (span.start < deadline) periods_.push_back({p, span.start, deadline});
            }
        }

        const std::size_t m = tasks_.size();
        const std::size_t full = std::size_t{1} << m;
        feasible_.assign(periods_.size(), std::vector<char>(full, 0));
        std::vector<TimePoint> finish(full);
        for (std::size_t j = 0; j < periods_.size(); ++j) {
            finish[0] = periods_[j].start;
            feasible_[j][0] = 1;
            for (std::size_t mask = 1; mask < full; ++mask) {
                const int top = std::bit_width(mask) - 1;
                const auto& t = tasks_[static_cast<std::size_t>(top)];
                finish[mask] = max(finish[mask ^ (std::size_t{1} << top)], t.arrival) + Rational(t.cost);
                feasible_[j][mask] = finish[mask] <= periods_[j].deadline ? 1 : 0;
            }
        }
    }

    const std::vector<TaskSpec>& tasks() const { return tasks_; }

    std::int64_t total_weight(bool byCost) const {
        std::int64_t sum = 0;
        for (const auto& t : tasks_) sum += byCost ? t.cost : 1;
        return sum;
    }

    // Maximum completable weight, and a witness schedule that attains it.
    std::pair<std::int64_t, std::vector<ScheduledExec>> maximize(bool byCost) const {
        const std::size_t m = tasks_.size();
        const std::size_t full = std::size_t{1} << m;
        std::vector<std::int64_t> weight(full, 0);
        for (std::size_t mask = 1; mask < full; ++mask) {
            const int top = std::bit_width(mask) - 1;
            weight[mask] = weight[mask ^ (std::size_t{1} << top)] +
                           (byCost ? tasks_[static_cast<std::size_t>(top)].cost : 1);
        }
        // best[j][mask]: completable weight from periods j.. with mask available
        std::vector<std::vector<std::int64_t>> best(periods_.size() + 1,
                                                    std::vector<std::int64_t>(full, 0));
        for (std::size_t j = periods_.size(); j-- > 0;) {
            for (std::size_t mask = 0; mask < full; ++mask) {
                std::int64_t value = best[j + 1][mask];
                std::size_t sub = mask;
                while (true) {
                    if (feasible_[j][sub]) value = std::max(value, weight[sub] + best[j + 1][mask ^ sub]);
                    if (sub == 0) break;
                    sub = (sub - 1) & mask;
                }
                best[j][mask] = value;
            }
        }

        std::vector<ScheduledExec> witness;
        std::size_t mask = full - 1;
        for (std::size_t j = 0; j < periods_.size(); ++j) {
            std::size_t chosen = 0;
            std::size_t sub = mask;
            while (true) {
                if (feasible_[j][sub] && weight[sub] + best[j + 1][mask ^ sub] == best[j][mask]) {
                    chosen = sub;
                    break;
                }
                if (sub == 0) break;
                sub = (sub - 1) & mask;
            }
            TimePoint t = periods_[j].start;
            for (std::size_t i = 0; i < m; ++i) {
                if (!(chosen & (std::size_t{1} << i))) continue;
                t = max(t, tasks_[i].arrival);
                witness.push_back({periods_[j].proc, tasks_[i].id, t});
                t = t + Rational(tasks_[i].cost);
            }
            mask ^= chosen;
        }
        return {best.empty() ? 0 : best[0][full - 1], witness};
    }

private:
    TimePoint checkpoint_;
    std::vector<TaskSpec> tasks_;
    std::vector<ClippedPeriod> periods_;
    std::vector<std::vector<char>> feasible_;
};

void check_oracle_budget(const AdversarialPattern& pattern, const TimePoint& checkpoint) {
    auto violations = validate_pattern(pattern);
    if (!violations.empty()) throw validation_error("invalid pattern: " + violations.front());
    if (pattern.params.n > 2)
        throw budget_error("offline oracle budget: n = " + std::to_string(pattern.params.n) + ", limit 2");
    std::int64_t crashRestarts = 0;
    for (const auto& e : pattern.events)
        if (e.kind != EventKind::Inject && e.time <= checkpoint) ++crashRestarts;
    if (crashRestarts > 12)
        throw budget_error("offline oracle budget: " + std::to_string(crashRestarts) +
                           " crash/restart events at the checkpoint, limit 12");
}

} // namespace

OptResult opt_brute_force(const AdversarialPattern& pattern, const TimePoint& checkpoint) {
    if (checkpoint < TimePoint(0)) throw precondition_error("checkpoint must be at least 0");
    check_oracle_budget(pattern, checkpoint);
    CheckpointSolver solver(pattern, checkpoint, std::nullopt);
    OptResult out;
    auto [bestCost, costWitness] = solver.maximize(true);
    auto [bestCount, taskWitness] = solver.maximize(false);
    out.minPendingCost = solver.total_weight(true) - bestCost;
    out.minPendingTasks = solver.total_weight(false) - bestCount;
    out.costWitness = std::move(costWitness);
    out.taskWitness = std::move(taskWitness);
    return out;
}

std::vector<OptPoint> opt_pending_curve(const AdversarialPattern& pattern,
                                        const std::vector<TimePoint>& instants) {
    std::vector<OptPoint> out;
    out.reserve(instants.size());
    for (const auto& t : instants) {
        check_oracle_budget(pattern, t);
        CheckpointSolver all(pattern, t, std::nullopt);
        CheckpointSolver longOnly(pattern, t, pattern.params.lmax);
        OptPoint point;
        point.time = t;
        point.minPendingCost = all.total_weight(true) - all.maximize(true).first;
        point.minPendingTasks = all.total_weight(false) - all.maximize(false).first;
        point.minPendingLongTasks = longOnly.total_weight(false) - longOnly.maximize(false).first;
        out.push_back(point);
    }
    return out;
}

bool dec_c_sched(const AdversarialPattern& pattern, const TimePoint& checkpoint, std::int64_t omega) {
    if (omega < 0) throw precondition_error("omega must be at least 0");
    return opt_brute_force(pattern, checkpoint).minPendingCost <= omega;
}

bool dec_t_sched(const AdversarialPattern& pattern, const TimePoint& checkpoint, std::int64_t omega) {
    if (omega < 0) throw precondition_error("omega must be at least 0");
    return opt_brute_force(pattern, checkpoint).minPendingTasks <= omega;
}

ReductionInstance reduce_partition(const std::vector<std::int64_t>& values) {
    if (values.size() < 2)
        throw precondition_error("partition reduction needs at least two values");
    std::int64_t sum = 0;
    std::int64_t lo = values.front(), hi = values.front();
    for (std::int64_t v : values) {
        if (v < 1) throw precondition_error("partition values must be positive integers");
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ReductionInstance out;
    out.pattern.params = {1, Rational(1), lo, hi, 1};
    TimePoint half(sum, 2);
    std::int64_t id = 0;
    for (std::int64_t v : values) {
        TaskSpec task{++id, TimePoint(0), v};
        out.pattern.events.push_back(AdversaryEvent::make_inject(TimePoint(0), task));
    }
    out.pattern.events.push_back(AdversaryEvent::make_crash(half, 1));
    out.pattern.events.push_back(AdversaryEvent::make_restart(half, 1));
    out.pattern.events.push_back(AdversaryEvent::make_crash(TimePoint(sum), 1));
    out.checkpoint = TimePoint(sum + 1);
    out.omega = 0;
    return out;
}

bool solve_partition_via_scheduling(const std::vector<std::int64_t>& values) {
    auto instance = reduce_partition(values);
    return dec_c_sched(instance.pattern, instance.checkpoint, instance.omega);
}

bool subset_sum_partitionable(const std::vector<std::int64_t>& values) {
    std::int64_t sum = std::accumulate(values.begin(), values.end(), std::int64_t{0});
    if (sum % 2 != 0) return false;
    std::int64_t half = sum / 2;
    std::vector<char> reach(static_cast<std::size_t>(half) + 1, 0);
    reach[0] = 1;
    for (std::int64_t v : values)
        for (std::int64_t s = half; s >= v; --s)
            if (reach[static_cast<std::size_t>(s - v)]) reach[static_cast<std::size_t>(s)] = 1;
    return reach[static_cast<std::size_t>(half)] != 0;
}

namespace {

// Long/short pending backlog of a trace at an instant, reconstructed from
// inject/inform rows (duplicate informs do not double-count).
struct Backlogs {
    std::int64_t shortCount = 0;
    std::int64_t longCount = 0;
};

Backlogs backlogs_at(const RunTrace& trace, const TimePoint& t) {
    auto tasks = trace.pattern.task_map();
    std::set<std::int64_t> informed;
    Backlogs out;
    const std::int64_t lmax = trace.pattern.params.lmax;
    for (const auto& s : trace.samples) {
        if (s.time > t) break;
        if (s.kind == TraceEventKind::Inject) {
            (tasks.at(s.task).cost == lmax ? out.longCount : out.shortCount) += 1;
        } else if (s.kind == TraceEventKind::Inform) {
            if (informed.insert(s.task).second)
                (tasks.at(s.task).cost == lmax ? out.longCount : out.shortCount) -= 1;
        }
    }
    return out;
}

} // namespace

AdversaryRun lower_bound_adversary(SchedulerKind kind,
                                   std::int64_t lmin,
                                   std::int64_t lmax,
                                   const Rational& speedup,
                                   int phaseCount,
                                   std::int64_t beta) {
    if (phaseCount < 0) throw precondition_error("phase count must be at least 0");
    if (!non_competitive_check(lmin, lmax, speedup)) {
        auto sufficient = sufficient_speedup(lmin, lmax);
        throw precondition_error(
            "speedup " + speedup.str() + " is outside the non-competitive range for lmin=" +
            std::to_string(lmin) + ", lmax=" + std::to_string(lmax) +
            " (a competitive scheduler exists at speedup >= " + sufficient.speedup.str() +
            "; non-competitiveness is guaranteed below " + sufficient.nonCompetitiveBelow.str() + ")");
    }

    AdversaryRun run;
    run.gamma = gamma_value(lmin, lmax, speedup);
    run.pattern.params = {1, speedup, lmin, lmax, beta};
    SchedulerSpec spec{kind};

    if (phaseCount == 0) {
        run.algTrace.pattern = run.pattern;
        run.offTrace.pattern = run.pattern;
        return run;
    }

    std::int64_t nextId = 0;
    std::vector<ScheduledExec> offSchedule;
    std::vector<std::int64_t> offShort, offLong; // offline pending, oldest first
    auto injectAt = [&](const TimePoint& t, std::int64_t cost) {
        TaskSpec task{++nextId, t, cost};
        run.pattern.events.push_back(AdversaryEvent::make_inject(t, task));
        (cost == lmax ? offLong : offShort).push_back(task.id);
    };

    TimePoint phaseStart(0);
    for (std::int64_t i = 0; i < run.gamma; ++i) injectAt(phaseStart, lmin);
    injectAt(phaseStart, lmax);

    struct PhaseShape {
        int scenario;
        std::int64_t kappa;
        TimePoint start;
    };
    std::vector<PhaseShape> shapes;

    auto taskCosts = [&]() { return run.pattern.task_map(); };

    for (int phase = 1; phase <= phaseCount; ++phase) {
        // Observe the scheduler's next decisions on the committed pattern
        // with no further interference.
        SimulationConfig scratch;
        scratch.pattern = run.pattern;
        scratch.scheduler = spec;
        scratch.horizon = phaseStart + div_by_speedup(run.gamma * lmin + lmax, speedup) + Rational(1);
        RunTrace preview = run_simulation(scratch);

        auto costs = taskCosts();
        std::int64_t shortDecisions = 0;
        int scenario = 0;
        for (const auto& s : preview.samples) {
            if (s.kind != TraceEventKind::Start || s.time < phaseStart) continue;
            if (costs.at(s.task).cost == lmax) {
                scenario = 1;
                break;
            }
            if (++shortDecisions == run.gamma) {
                scenario = 2;
                break;
            }
        }
        if (scenario == 0)
            throw internal_error("adversary could not classify the scheduler's phase-" +
                                 std::to_string(phase) + " decisions");

        std::int64_t kappa = scenario == 1 ? shortDecisions : run.gamma;
        TimePoint phaseEnd;
        if (scenario == 1) {
            phaseEnd = phaseStart + Rational((kappa + 1) * lmin);
            if (static_cast<std::int64_t>(offShort.size()) < kappa + 1)
                throw internal_error("offline backlog too small for a scenario-1 phase");
            for (std::int64_t j = 0; j <= kappa; ++j) {
                offSchedule.push_back({1, offShort.front(), phaseStart + Rational(j * lmin)});
                offShort.erase(offShort.begin());
            }
        } else {
            phaseEnd = phaseStart + Rational(lmax);
            if (offLong.empty()) throw internal_error("offline long backlog empty in a scenario-2 phase");
            offSchedule.push_back({1, offLong.front(), phaseStart});
            offLong.erase(offLong.begin());
        }
        shapes.push_back({scenario, kappa, phaseStart});

        run.pattern.events.push_back(AdversaryEvent::make_crash(phaseEnd, 1));
        run.pattern.events.push_back(AdversaryEvent::make_restart(phaseEnd, 1));
        if (scenario == 1)
            for (std::int64_t j = 0; j <= kappa; ++j) injectAt(phaseEnd, lmin);
        else
            injectAt(phaseEnd, lmax);

        if (static_cast<std::int64_t>(offShort.size()) != run.gamma || offLong.size() != 1)
            throw internal_error("offline pending invariant broken after phase " + std::to_string(phase));
        phaseStart = phaseEnd;
    }

    SimulationConfig committed;
    committed.pattern = run.pattern;
    committed.scheduler = spec;
    committed.horizon = phaseStart;
    run.algTrace = run_simulation(committed);

    auto off = run_offline_reference(run.pattern, offSchedule, phaseStart);
    if (!off.flagged.empty())
        throw internal_error("offline reference schedule overlapped a crash");
    run.offTrace = std::move(off.trace);

    for (std::size_t i = 0; i < shapes.size(); ++i) {
        PhaseRecord rec;
        rec.index = static_cast<int>(i) + 1;
        rec.scenario = shapes[i].scenario;
        rec.kappa = shapes[i].kappa;
        rec.algPendingAtStart = run.algTrace.pending_tasks_at(shapes[i].start);
        rec.offPendingAtStart = run.offTrace.pending_tasks_at(shapes[i].start);
        run.phases.push_back(rec);
    }
    run.algFinalPending = run.algTrace.pending_tasks_at(phaseStart);
    run.offFinalPending = run.offTrace.pending_tasks_at(phaseStart);
    return run;
}

std::vector<std::string> verify_adversary_run(const AdversaryRun& run) {
    std::vector<std::string> problems;
    const auto& params = run.pattern.params;
    const std::int64_t gamma = run.gamma;

    for (const auto& rec : run.phases)
        if (rec.offPendingAtStart != gamma + 1)
            problems.push_back("phase " + std::to_string(rec.index) + ": offline pending " +
                               std::to_string(rec.offPendingAtStart) + " instead of " +
                               std::to_string(gamma + 1));

    auto costs = run.pattern.task_map();
    for (const auto& r : run.algTrace.reports)
        if (costs.at(r.task).cost == params.lmax) {
            problems.push_back("scheduler completed long task " + std::to_string(r.task) + " at t=" +
                               r.time.str());
            break;
        }

    // M = floor(s*lmax/lmin) short completions fit into one long-task span.
    const std::int64_t completionsPerPhase =
        (params.speedup * Rational(params.lmax) / Rational(params.lmin)).floor();
    // Phase start instants: t=0 plus each phase-ending crash.
    std::vector<TimePoint> starts;
    starts.push_back(TimePoint(0));
    for (const auto& e : run.pattern.events)
        if (e.kind == EventKind::Crash) starts.push_back(e.time);

    std::vector<std::int64_t> potentials;
    for (std::size_t i = 0; i < run.phases.size(); ++i) {
        auto b = backlogs_at(run.algTrace, starts[i]);
        potentials.push_back((completionsPerPhase + 1) * b.longCount + b.shortCount);
        if (run.phases[i].scenario == 2 && i + 1 < starts.size()) {
            auto next = backlogs_at(run.algTrace, starts[i + 1]);
            if (next.longCount != b.longCount + 1)
                problems.push_back("phase " + std::to_string(run.phases[i].index) +
                                   ": long backlog moved from " + std::to_string(b.longCount) + " to " +
                                   std::to_string(next.longCount) + ", expected +1");
        }
    }
    if (!run.phases.empty()) {
        auto endB = backlogs_at(run.algTrace, starts[run.phases.size()]);
        potentials.push_back((completionsPerPhase + 1) * endB.longCount + endB.shortCount);
    }
    for (std::size_t i = 1; i < potentials.size(); ++i)
        if (potentials[i] < potentials[i - 1] + 1) {
            problems.push_back("backlog potential stalled across phase " + std::to_string(i));
            break;
        }

    if (!run.phases.empty()) {
        Rational required(static_cast<std::int64_t>(run.phases.size()), completionsPerPhase + 1);
        if (Rational(run.algFinalPending) < required)
            problems.push_back("final pending " + std::to_string(run.algFinalPending) +
                               " below the divergence bound " + required.str());
    }
    return problems;
}

std::string phase_log_to_csv(const std::vector<PhaseRecord>& phases) {
    std::ostringstream out;
    out << "phase,scenario,kappa,alg_pending,off_pending\n";
    for (const auto& r : phases)
        out << r.index << ',' << r.scenario << ',' << r.kappa << ',' << r.algPendingAtStart << ','
            << r.offPendingAtStart << '\n';
    return out.str();
}

} // namespace crashsched
