#include "crashsched/engine.hpp"

#include <algorithm>

#include "crashsched/repository.hpp"

namespace crashsched {

namespace {

enum class ProcStatus { Ready, Executing, Blocked, Crashed };

struct ProcState {
    ProcStatus status = ProcStatus::Ready;
    TaskSpec current;
    TimePoint start;
    TimePoint finish;
    SchedulerMemory memory;
};

void ensure_valid(const AdversarialPattern& pattern) {
    auto violations = validate_pattern(pattern);
    if (!violations.empty()) {
        std::string msg = "invalid pattern (" + std::to_string(violations.size()) + " violation(s)): " + violations.front();
        throw validation_error(msg);
    }
}

} // namespace

RunTrace run_simulation(const SimulationConfig& config) {
    ensure_valid(config.pattern);
    const auto& pattern = config.pattern;
    const auto& params = pattern.params;
    if (config.horizon < TimePoint(0)) throw precondition_error("horizon must be at least 0");
    if (auto last = pattern.last_event_time(); last && config.horizon < *last)
        throw precondition_error("horizon " + config.horizon.str() + " lies before the last pattern event at " +
                                 last->str());
    if (config.recordEvery && !(*config.recordEvery > Rational(0)))
        throw precondition_error("recordEvery must be positive");
    if (config.eventBudget < 1) throw precondition_error("event budget must be positive");

    auto policy = make_scheduler(config.scheduler.kind, params, pattern);

    std::vector<ProcState> procs(static_cast<std::size_t>(params.n) + 1);
    for (auto& p : procs) p.memory = policy->initial_memory();

    Repository repo;
    RunTrace trace;
    trace.pattern = pattern;

    std::size_t nextEvent = 0;
    std::optional<TimePoint> nextSample;
    if (config.recordEvery) nextSample = *config.recordEvery;

    bool initialInstant = true;
    while (true) {
        std::optional<TimePoint> t;
        auto offer = [&](const TimePoint& c) {
            if (!t || c < *t) t = c;
        };
        if (initialInstant) offer(TimePoint(0));
        if (nextEvent < pattern.events.size()) offer(pattern.events[nextEvent].time);
        for (int p = 1; p <= params.n; ++p)
            if (procs[static_cast<std::size_t>(p)].status == ProcStatus::Executing)
                offer(procs[static_cast<std::size_t>(p)].finish);
        if (nextSample && *nextSample <= config.horizon) offer(*nextSample);
        if (!t || *t > config.horizon) break;
        initialInstant = false;

        const TimePoint now = *t;
        const std::size_t rowsBefore = trace.samples.size();
        auto row = [&](TraceEventKind kind, int proc, std::int64_t task) {
            trace.samples.push_back({now, kind, proc, task, 0, 0});
        };

        // 1. completion informs, processor id ascending
        for (int p = 1; p <= params.n; ++p) {
            auto& st = procs[static_cast<std::size_t>(p)];
            if (st.status != ProcStatus::Executing || st.finish != now) continue;
            repo.inform(st.current.id);
            policy->on_informed(st.current, st.memory);
            row(TraceEventKind::Inform, p, st.current.id);
            trace.reports.push_back({now, p, st.current.id, st.start});
            st.status = ProcStatus::Ready;
        }

        std::size_t groupEnd = nextEvent;
        while (groupEnd < pattern.events.size() && pattern.events[groupEnd].time == now) ++groupEnd;

        // 2. crashes: an executing task is discarded unreported, a blocked
        //    getter silently leaves the wait set
        for (std::size_t i = nextEvent; i < groupEnd; ++i) {
            const auto& e = pattern.events[i];
            if (e.kind != EventKind::Crash) continue;
            auto& st = procs[static_cast<std::size_t>(e.proc)];
            if (st.status == ProcStatus::Blocked) repo.drop_blocked(e.proc);
            st.status = ProcStatus::Crashed;
            row(TraceEventKind::Crash, e.proc, -1);
        }

        // 3. restarts: fresh cycle, fresh scheduler memory
        for (std::size_t i = nextEvent; i < groupEnd; ++i) {
            const auto& e = pattern.events[i];
            if (e.kind != EventKind::Restart) continue;
            auto& st = procs[static_cast<std::size_t>(e.proc)];
            st.status = ProcStatus::Ready;
            st.memory = policy->initial_memory();
            row(TraceEventKind::Restart, e.proc, -1);
        }

        // 4. injections in authoring order; blocked getters wake for step 5
        for (std::size_t i = nextEvent; i < groupEnd; ++i) {
            const auto& e = pattern.events[i];
            if (e.kind != EventKind::Inject) continue;
            auto released = repo.inject(e.task);
            for (int q : released) procs[static_cast<std::size_t>(q)].status = ProcStatus::Ready;
            row(TraceEventKind::Inject, -1, e.task.id);
        }
        nextEvent = groupEnd;

        // 5. gets, processor id ascending, all against the same snapshot
        for (int p = 1; p <= params.n; ++p) {
            auto& st = procs[static_cast<std::size_t>(p)];
            if (st.status != ProcStatus::Ready) continue;
            auto snapshot = repo.get(p);
            if (!snapshot) {
                st.status = ProcStatus::Blocked;
                continue;
            }
            TaskSpec task = policy->pick(*snapshot, p, st.memory);
            bool inSnapshot = std::any_of(snapshot->begin(), snapshot->end(),
                                          [&](const TaskSpec& s) { return s.id == task.id && s == task; });
            if (!inSnapshot)
                throw internal_error("scheduler chose task " + std::to_string(task.id) +
                                     " outside the pending snapshot");
            st.status = ProcStatus::Executing;
            st.current = task;
            st.start = now;
            st.finish = now + div_by_speedup(task.cost, params.speedup);
            row(TraceEventKind::Start, p, task.id);
        }

        if (nextSample && *nextSample == now) {
            row(TraceEventKind::Sample, -1, -1);
            while (nextSample && *nextSample <= now) nextSample = *nextSample + *config.recordEvery;
        }

        for (std::size_t i = rowsBefore; i < trace.samples.size(); ++i) {
            trace.samples[i].pendingTasks = repo.pending_tasks();
            trace.samples[i].pendingCost = repo.pending_cost();
        }
        if (static_cast<std::int64_t>(trace.samples.size()) > config.eventBudget)
            throw budget_error("event budget of " + std::to_string(config.eventBudget) +
                               " trace rows exceeded at t=" + now.str());
    }
    return trace;
}

std::vector<std::vector<AlivePeriod>> alive_periods(const AdversarialPattern& pattern) {
    std::vector<std::vector<AlivePeriod>> periods(static_cast<std::size_t>(pattern.params.n) + 1);
    for (int p = 1; p <= pattern.params.n; ++p)
        periods[static_cast<std::size_t>(p)].push_back({TimePoint(0), std::nullopt});
    for (const auto& e : pattern.events) {
        if (e.kind == EventKind::Crash)
            periods[static_cast<std::size_t>(e.proc)].back().end = e.time;
        else if (e.kind == EventKind::Restart)
            periods[static_cast<std::size_t>(e.proc)].push_back({e.time, std::nullopt});
    }
    return periods;
}

OfflineRun run_offline_reference(const AdversarialPattern& pattern,
                                 const std::vector<ScheduledExec>& schedule,
                                 const TimePoint& horizon) {
    ensure_valid(pattern);
    if (horizon < TimePoint(0)) throw precondition_error("horizon must be at least 0");
    auto tasks = pattern.task_map();
    auto periods = alive_periods(pattern);

    struct Entry {
        ScheduledExec exec;
        TimePoint finish;
        bool informed = false;
        std::string flagReason;
        TimePoint effectiveEnd;
    };
    std::vector<Entry> entries;
    entries.reserve(schedule.size());
    for (const auto& s : schedule) {
        if (s.proc < 1 || s.proc > pattern.params.n)
            throw validation_error("schedule references processor " + std::to_string(s.proc));
        auto it = tasks.find(s.task);
        if (it == tasks.end())
            throw validation_error("schedule references unknown task " + std::to_string(s.task));
        if (s.start < it->second.arrival)
            throw validation_error("task " + std::to_string(s.task) + " scheduled at " + s.start.str() +
                                   " before its arrival " + it->second.arrival.str());
        Entry e;
        e.exec = s;
        e.finish = s.start + Rational(it->second.cost); // offline runs at speed 1
        e.effectiveEnd = e.finish;
        entries.push_back(std::move(e));
    }

    for (auto& e : entries) {
        bool startedAlive = false;
        for (const auto& period : periods[static_cast<std::size_t>(e.exec.proc)]) {
            if (e.exec.start < period.start) continue;
            if (period.end && e.exec.start >= *period.end) continue;
            startedAlive = true;
            if (!period.end || e.finish <= *period.end) {
                e.informed = true; // a finish exactly at the crash instant still reports
            } else {
                e.flagReason = "execution window overlaps the crash at t=" + period.end->str();
                e.effectiveEnd = *period.end;
            }
            break;
        }
        if (!startedAlive && !e.informed && e.flagReason.empty()) {
            e.flagReason = "started on a crashed processor";
            e.effectiveEnd = e.exec.start;
        }
    }

    // overlapping effective executions on one processor are a schedule bug
    std::vector<const Entry*> order;
    for (const auto& e : entries) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(), [](const Entry* a, const Entry* b) {
        if (a->exec.proc != b->exec.proc) return a->exec.proc < b->exec.proc;
        if (a->exec.start != b->exec.start) return a->exec.start < b->exec.start;
        return a->exec.task < b->exec.task;
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        const Entry* prev = order[i - 1];
        const Entry* cur = order[i];
        if (prev->exec.proc != cur->exec.proc) continue;
        if (cur->exec.start < prev->effectiveEnd)
            throw validation_error("overlapping executions on processor " + std::to_string(cur->exec.proc) +
                                   ": task " + std::to_string(cur->exec.task) + " starts at " +
                                   cur->exec.start.str() + " during task " + std::to_string(prev->exec.task));
    }

    struct Moment {
        std::vector<const Entry*> informs;
        std::vector<const AdversaryEvent*> events;
        std::vector<const Entry*> starts;
    };
    std::map<TimePoint, Moment> moments;

    for (const auto& e : pattern.events)
        if (e.time <= horizon) moments[e.time].events.push_back(&e);
    for (const auto& e : entries) {
        if (e.exec.start <= horizon) moments[e.exec.start].starts.push_back(&e);
        if (e.informed && e.finish <= horizon) moments[e.finish].informs.push_back(&e);
    }

    OfflineRun out;
    out.trace.pattern = pattern;
    Repository repo;
    for (auto& [time, moment] : moments) {
        auto byProcTask = [](const Entry* a, const Entry* b) {
            if (a->exec.proc != b->exec.proc) return a->exec.proc < b->exec.proc;
            return a->exec.task < b->exec.task;
        };
        std::sort(moment.informs.begin(), moment.informs.end(), byProcTask);
        std::sort(moment.starts.begin(), moment.starts.end(), byProcTask);

        const std::size_t rowsBefore = out.trace.samples.size();
        auto row = [&](TraceEventKind kind, int proc, std::int64_t task) {
            out.trace.samples.push_back({time, kind, proc, task, 0, 0});
        };
        for (const Entry* e : moment.informs) {
            repo.inform(e->exec.task); // duplicate completion reports are no-ops
            row(TraceEventKind::Inform, e->exec.proc, e->exec.task);
            out.trace.reports.push_back({time, e->exec.proc, e->exec.task, e->exec.start});
        }
        for (int pass = 0; pass < 3; ++pass) {
            for (const AdversaryEvent* e : moment.events) {
                if (pass == 0 && e->kind == EventKind::Crash) row(TraceEventKind::Crash, e->proc, -1);
                if (pass == 1 && e->kind == EventKind::Restart) row(TraceEventKind::Restart, e->proc, -1);
                if (pass == 2 && e->kind == EventKind::Inject) {
                    repo.inject(e->task);
                    row(TraceEventKind::Inject, -1, e->task.id);
                }
            }
        }
        for (const Entry* e : moment.starts) row(TraceEventKind::Start, e->exec.proc, e->exec.task);
        for (std::size_t i = rowsBefore; i < out.trace.samples.size(); ++i) {
            out.trace.samples[i].pendingTasks = repo.pending_tasks();
            out.trace.samples[i].pendingCost = repo.pending_cost();
        }
    }

    for (const auto& e : entries)
        if (!e.flagReason.empty())
            out.flagged.push_back({e.exec.proc, e.exec.task, e.exec.start, e.flagReason});
    return out;
}

} // namespace crashsched
