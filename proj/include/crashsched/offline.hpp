#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crashsched/core.hpp"
#include "crashsched/engine.hpp"

namespace crashsched {

// Exact optimum of the speed-1 offline problem at one checkpoint, with
// witness schedules. Guarded by a hard size budget (n <= 2, at most 12 tasks
// and 12 crash/restart events at or before the checkpoint): beyond it the
// solver refuses with budget_error rather than running forever.
struct OptResult {
    std::int64_t minPendingCost = 0;
    std::int64_t minPendingTasks = 0;
    std::vector<ScheduledExec> costWitness;  // attains minPendingCost
    std::vector<ScheduledExec> taskWitness;  // attains minPendingTasks
};

OptResult opt_brute_force(const AdversarialPattern& pattern, const TimePoint& checkpoint);

// Exact optimum pending values per sampled instant. minPendingLongTasks is
// the optimum count of pending lmax-cost tasks (solved over long tasks only).
struct OptPoint {
    TimePoint time;
    std::int64_t minPendingCost = 0;
    std::int64_t minPendingTasks = 0;
    std::int64_t minPendingLongTasks = 0;
};

std::vector<OptPoint> opt_pending_curve(const AdversarialPattern& pattern,
                                        const std::vector<TimePoint>& instants);

// Can some speed-1 schedule leave pending cost (resp. pending task count)
// at most omega at the checkpoint?
bool dec_c_sched(const AdversarialPattern& pattern, const TimePoint& checkpoint, std::int64_t omega);
bool dec_t_sched(const AdversarialPattern& pattern, const TimePoint& checkpoint, std::int64_t omega);

// Number-partition instance encoded as a scheduling decision problem: one
// processor, all tasks at time 0, two equal life periods of length sum/2,
// checkpoint after the second crash, omega = 0.
struct ReductionInstance {
    AdversarialPattern pattern;
    TimePoint checkpoint;
    std::int64_t omega = 0;
};

ReductionInstance reduce_partition(const std::vector<std::int64_t>& values);

bool solve_partition_via_scheduling(const std::vector<std::int64_t>& values);

// Independent subset-sum oracle used to cross-check the reduction.
bool subset_sum_partitionable(const std::vector<std::int64_t>& values);

// One adversary phase: `scenario` 1 means the scheduler committed to a long
// task after kappa short decisions; 2 means it opened with gamma short
// decisions. Pending counts are taken at the phase start instant, after that
// boundary's crash/restart/injections.
struct PhaseRecord {
    int index = 0;
    int scenario = 0;
    std::int64_t kappa = 0;
    std::int64_t algPendingAtStart = 0;
    std::int64_t offPendingAtStart = 0;
};

struct AdversaryRun {
    AdversarialPattern pattern;
    RunTrace algTrace;
    RunTrace offTrace;
    std::vector<PhaseRecord> phases;
    std::int64_t gamma = 0;
    std::int64_t algFinalPending = 0;
    std::int64_t offFinalPending = 0;
};

// Single-processor adversary for a deterministic scheduler at a speedup in
// the non-competitive range. Builds the crash/injection pattern phase by
// phase by observing the scheduler's decisions on the pattern so far, plus
// the offline schedule that keeps its own pending bounded.
AdversaryRun lower_bound_adversary(SchedulerKind kind,
                                   std::int64_t lmin,
                                   std::int64_t lmax,
                                   const Rational& speedup,
                                   int phaseCount,
                                   std::int64_t beta);

// Structural checks on an adversary run: the offline side holds exactly
// gamma+1 pending at every phase start, the scheduler never completes a long
// task, every scenario-2 phase grows its long backlog by exactly one, and the
// weighted backlog potential rises every phase, forcing pending divergence of
// at least phases/(floor(speedup*lmax/lmin)+1). Returns the problems found.
std::vector<std::string> verify_adversary_run(const AdversaryRun& run);

std::string phase_log_to_csv(const std::vector<PhaseRecord>& phases);

} // namespace crashsched
