#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crashsched/core.hpp"
#include "crashsched/schedulers.hpp"

namespace crashsched {

struct SimulationConfig {
    AdversarialPattern pattern;
    SchedulerSpec scheduler;
    TimePoint horizon;                       // must be >= every pattern event time
    std::optional<Rational> recordEvery;     // extra "sample" rows at these multiples
    std::int64_t eventBudget = 10'000'000;   // processed trace rows before giving up
};

// Deterministic discrete-event run. Instant ordering: completion informs
// (processor id ascending), crashes, restarts, injections (authoring order),
// then one get per ready processor (id ascending), all gets seeing the same
// post-injection snapshot. Work conserving: a ready processor with non-empty
// pending always starts a task at that instant.
RunTrace run_simulation(const SimulationConfig& config);

// Per-processor alive spans [start, end], end being the next crash instant
// (nullopt for the final open span). Index 0 is unused; processors are 1..n.
struct AlivePeriod {
    TimePoint start;
    std::optional<TimePoint> end;
};

std::vector<std::vector<AlivePeriod>> alive_periods(const AdversarialPattern& pattern);

// One uninterrupted execution in an explicit offline schedule.
struct ScheduledExec {
    int proc = 0;
    std::int64_t task = 0;
    TimePoint start;
};

struct OfflineFlag {
    int proc = 0;
    std::int64_t task = 0;
    TimePoint start;
    std::string reason;
};

struct OfflineRun {
    RunTrace trace;
    std::vector<OfflineFlag> flagged; // executions that overlapped a crash: never informed
};

// Replays an explicit speed-1 schedule against the pattern under the same
// instant ordering. Throws validation_error for a start before the task's
// arrival, an unknown task, a bad processor id, or overlapping effective
// executions on one processor. An execution cut by a crash (or begun on a
// dead processor) is not informed, only flagged.
OfflineRun run_offline_reference(const AdversarialPattern& pattern,
                                 const std::vector<ScheduledExec>& schedule,
                                 const TimePoint& horizon);

} // namespace crashsched
