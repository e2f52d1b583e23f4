#pragma once

#include <vector>

#include "crashsched/core.hpp"

namespace testutil {

using crashsched::AdversarialPattern;
using crashsched::AdversaryEvent;
using crashsched::Rational;
using crashsched::SystemParams;
using crashsched::TaskSpec;

inline SystemParams params(int n, Rational speedup, std::int64_t lmin, std::int64_t lmax,
                           std::int64_t beta) {
    SystemParams p;
    p.n = n;
    p.speedup = speedup;
    p.lmin = lmin;
    p.lmax = lmax;
    p.beta = beta;
    return p;
}

inline AdversaryEvent inject(Rational t, std::int64_t id, std::int64_t cost) {
    TaskSpec task;
    task.id = id;
    task.arrival = t;
    task.cost = cost;
    return AdversaryEvent::make_inject(t, task);
}

inline AdversaryEvent crash(Rational t, int proc) { return AdversaryEvent::make_crash(t, proc); }
inline AdversaryEvent restart(Rational t, int proc) { return AdversaryEvent::make_restart(t, proc); }

inline AdversarialPattern pattern(SystemParams p, std::vector<AdversaryEvent> events) {
    AdversarialPattern out;
    out.params = p;
    out.events = std::move(events);
    return out;
}

} // namespace testutil
