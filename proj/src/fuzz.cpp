#include "crashsched/fuzz.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include "crashsched/engine.hpp"
#include "crashsched/offline.hpp"

namespace crashsched {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) throw precondition_error("below(0)");
    return next() % bound;
}

std::uint64_t fuzz_trial_seed(std::uint64_t seed, int trial) {
    SplitMix64 rng(seed ^ (static_cast<std::uint64_t>(trial + 1) * 0x9E3779B97F4A7C15ULL));
    return rng.next();
}

namespace {

int event_rank(const AdversaryEvent& e) {
    switch (e.kind) {
    case EventKind::Crash: return 0;
    case EventKind::Restart: return 1;
    case EventKind::Inject: return 2;
    }
    return 3;
}

} // namespace

AdversarialPattern fuzz_pattern(SchedulerKind kind, int maxN, int maxTasks, std::uint64_t trialSeed) {
    if (maxN < 1 || maxTasks < 1) throw precondition_error("fuzz needs maxN >= 1 and maxTasks >= 1");
    SplitMix64 rng(trialSeed);
    SystemParams params;
    std::vector<std::int64_t> costs;

    switch (kind) {
    case SchedulerKind::Lis: {
        std::int64_t a = 1 + static_cast<std::int64_t>(rng.below(5));
        std::int64_t b = a;
        while (b == a) b = 1 + static_cast<std::int64_t>(rng.below(5));
        params.lmin = std::min(a, b);
        params.lmax = std::max(a, b);
        costs = {params.lmin, params.lmax};
        params.speedup = Rational(params.lmax, params.lmin);
        break;
    }
    case SchedulerKind::Burst: {
        // cost pairs up to 5 whose ratio exceeds the golden ratio
        static constexpr std::array<std::pair<int, int>, 7> pairs{
            {{1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 4}, {2, 5}, {3, 5}}};
        auto [a, b] = pairs[rng.below(pairs.size())];
        params.lmin = a;
        params.lmax = b;
        costs = {params.lmin, params.lmax};
        params.speedup = *burst_min_speedup(params.lmin, params.lmax);
        break;
    }
    case SchedulerKind::Laf: {
        int k = 1 + static_cast<int>(rng.below(3));
        std::set<std::int64_t> alphabet;
        while (static_cast<int>(alphabet.size()) < k)
            alphabet.insert(1 + static_cast<std::int64_t>(rng.below(5)));
        costs.assign(alphabet.begin(), alphabet.end());
        params.lmin = costs.front();
        params.lmax = costs.back();
        params.speedup = Rational(7, 2);
        break;
    }
    default:
        throw precondition_error("fuzz supports lis, burst and laf");
    }

    params.n = kind == SchedulerKind::Laf ? 1 : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxN)));
    params.beta = ceil_div(params.lmax, params.lmin);

    std::vector<AdversaryEvent> events;
    int taskCount = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(maxTasks)));
    for (int i = 0; i < taskCount; ++i) {
        TaskSpec task;
        task.id = i + 1;
        task.arrival = Rational(static_cast<std::int64_t>(rng.below(13)));
        task.cost = costs[rng.below(costs.size())];
        events.push_back(AdversaryEvent::make_inject(task.arrival, task));
    }

    int crashPairs = static_cast<int>(rng.below(5));
    std::vector<Rational> cursor(static_cast<std::size_t>(params.n) + 1, Rational(0));
    for (int i = 0; i < crashPairs; ++i) {
        int proc = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(params.n)));
        Rational crashAt = cursor[proc] + Rational(1 + static_cast<std::int64_t>(rng.below(4)));
        Rational restartAt = crashAt + Rational(static_cast<std::int64_t>(rng.below(4)));
        events.push_back(AdversaryEvent::make_crash(crashAt, proc));
        events.push_back(AdversaryEvent::make_restart(restartAt, proc));
        cursor[proc] = restartAt;
    }

    // stable: injects keep authoring (id) order within an instant
    std::stable_sort(events.begin(), events.end(), [](const AdversaryEvent& x, const AdversaryEvent& y) {
        if (x.time != y.time) return x.time < y.time;
        return event_rank(x) < event_rank(y);
    });

    AdversarialPattern pattern;
    pattern.params = params;
    pattern.events = std::move(events);
    return pattern;
}

TrialCheck check_trace(SchedulerKind kind, const RunTrace& trace) {
    auto curve = opt_pending_curve(trace.pattern, verification_instants(trace));
    const auto& p = trace.pattern.params;
    TrialCheck out;
    switch (kind) {
    case SchedulerKind::Lis:
        out.reports = verify_lis_bounds(trace, curve);
        out.incidents = redundancy_audit(trace, AuditClass::WholeList, p.beta * p.n * p.n);
        break;
    case SchedulerKind::Burst:
        out.reports = verify_burst_bounds(trace, curve);
        out.incidents = redundancy_audit(trace, AuditClass::CostClass, static_cast<std::int64_t>(p.n) * p.n);
        break;
    case SchedulerKind::Laf:
        out.reports = verify_laf_bound(trace, curve);
        out.incidents = redundancy_audit(trace, AuditClass::CostClass, p.beta * p.n * p.n);
        break;
    default:
        throw precondition_error("no verified bound for this scheduler");
    }
    return out;
}

FuzzResult fuzz_run(const FuzzOptions& options) {
    if (options.maxN > 2) throw budget_error("fuzz oracle budget allows at most 2 processors");
    if (options.maxTasks > 8) throw budget_error("fuzz oracle budget allows at most 8 tasks");
    if (options.trials < 0) throw precondition_error("trials must be non-negative");

    FuzzResult result;
    for (int trial = 0; trial < options.trials; ++trial) {
        AdversarialPattern pattern =
            fuzz_pattern(options.scheduler, options.maxN, options.maxTasks, fuzz_trial_seed(options.seed, trial));

        SimulationConfig cfg;
        cfg.pattern = pattern;
        cfg.scheduler.kind = options.scheduler;
        cfg.horizon = pattern.last_event_time().value_or(Rational(0)) + Rational(pattern.total_cost() + 1);
        RunTrace trace = run_simulation(cfg);

        TrialCheck check = check_trace(options.scheduler, trace);
        result.trialsRun = trial + 1;
        result.totalIncidents += static_cast<std::int64_t>(check.incidents.size());

        bool bad = !check.incidents.empty();
        for (const auto& r : check.reports) bad = bad || !r.holds;
        if (bad) {
            FuzzViolation v;
            v.trial = trial;
            v.pattern = pattern;
            v.reports = std::move(check.reports);
            v.incidents = check.incidents.size();
            result.firstViolation = std::move(v);
            break;
        }
    }
    return result;
}

} // namespace crashsched
