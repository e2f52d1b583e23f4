#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crashsched/rational.hpp"

namespace crashsched {

struct TaskSpec {
    std::int64_t id = 0;
    TimePoint arrival;
    std::int64_t cost = 0; // positive integer work units

    bool operator==(const TaskSpec& o) const = default;
};

struct SystemParams {
    int n = 1;            // processor count, ids 1..n
    Rational speedup{1};  // online processors run this much faster than offline
    std::int64_t lmin = 1;
    std::int64_t lmax = 1;
    std::int64_t beta = 1;

    bool operator==(const SystemParams& o) const = default;
};

enum class EventKind { Inject, Crash, Restart };

struct AdversaryEvent {
    TimePoint time;
    EventKind kind = EventKind::Inject;
    TaskSpec task; // inject only
    int proc = 0;  // crash/restart only

    static AdversaryEvent make_inject(TimePoint t, TaskSpec task);
    static AdversaryEvent make_crash(TimePoint t, int proc);
    static AdversaryEvent make_restart(TimePoint t, int proc);

    bool operator==(const AdversaryEvent& o) const = default;
};

struct AdversarialPattern {
    SystemParams params;
    std::vector<AdversaryEvent> events; // sorted by time, authoring order within an instant

    std::vector<TaskSpec> tasks() const;
    std::map<std::int64_t, TaskSpec> task_map() const;
    std::int64_t total_cost() const;
    std::optional<TimePoint> last_event_time() const;

    bool operator==(const AdversarialPattern& o) const = default;
};

// Every rule violation in the pattern, as human-readable data. Empty means valid.
// Same-instant crash/restart pairs are judged in processing order: crashes
// before restarts, authoring order within a kind.
std::vector<std::string> validate_pattern(const AdversarialPattern& pattern);

enum class TraceEventKind { Inject, Crash, Restart, Inform, Start, Sample };

const char* trace_event_name(TraceEventKind kind);

// One trace row. pendingTasks/pendingCost are the repository totals after the
// full instant ordering at `time` has been applied.
struct TraceSample {
    TimePoint time;
    TraceEventKind kind = TraceEventKind::Sample;
    int proc = -1;          // -1 when not applicable
    std::int64_t task = -1; // -1 when not applicable
    std::int64_t pendingTasks = 0;
    std::int64_t pendingCost = 0;

    bool operator==(const TraceSample& o) const = default;
};

struct TraceReport {
    TimePoint time; // inform instant
    int proc = 0;
    std::int64_t task = 0;
    TimePoint start; // when the reported execution began

    bool operator==(const TraceReport& o) const = default;
};

struct RunTrace {
    AdversarialPattern pattern;
    std::vector<TraceSample> samples;
    std::vector<TraceReport> reports;

    // Step-function lookups: value after the last instant <= t (0 before any sample).
    std::int64_t pending_tasks_at(const TimePoint& t) const;
    std::int64_t pending_cost_at(const TimePoint& t) const;
    // Distinct sample times, ascending.
    std::vector<TimePoint> instants() const;

    bool operator==(const RunTrace& o) const = default;
};

AdversarialPattern pattern_from_json(const std::string& text);
std::string pattern_to_json(const AdversarialPattern& pattern);

AdversarialPattern load_pattern(const std::string& path);
void save_pattern(const AdversarialPattern& pattern, const std::string& path);

// header: time,event,proc,task,pending_tasks,pending_cost
std::string trace_to_csv(const RunTrace& trace);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace crashsched
