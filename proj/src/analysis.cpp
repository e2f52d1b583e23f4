#include "crashsched/analysis.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "crashsched/schedulers.hpp"

namespace crashsched {

std::string bound_report_to_json(const BoundReport& report) {
    nlohmann::ordered_json j;
    j["bound"] = report.bound;
    j["holds"] = report.holds;
    j["worst_slack"] = report.worstSlack.str();
    if (report.violatingTime)
        j["violating_time"] = report.violatingTime->str();
    else
        j["violating_time"] = nullptr;
    j["reference"] = report.reference;
    return j.dump();
}

std::vector<TimePoint> verification_instants(const RunTrace& trace) {
    std::vector<TimePoint> out = trace.instants();
    if (out.empty() || !(out.front() == TimePoint(0))) out.insert(out.begin(), TimePoint(0));
    return out;
}

namespace {

// Scheduler-side pending values at each verification instant.
struct AlgPoint {
    TimePoint time;
    std::int64_t tasks = 0;
    std::int64_t cost = 0;
    std::int64_t longTasks = 0;
};

std::vector<AlgPoint> alg_series(const RunTrace& trace) {
    auto instants = verification_instants(trace);
    auto taskCosts = trace.pattern.task_map();
    const std::int64_t lmax = trace.pattern.params.lmax;

    std::vector<AlgPoint> out;
    out.reserve(instants.size());
    std::set<std::int64_t> informed;
    std::int64_t tasks = 0, cost = 0, longTasks = 0;
    std::size_t row = 0;
    for (const auto& t : instants) {
        for (; row < trace.samples.size() && trace.samples[row].time <= t; ++row) {
            const auto& s = trace.samples[row];
            if (s.kind == TraceEventKind::Inject) {
                const auto& task = taskCosts.at(s.task);
                ++tasks;
                cost += task.cost;
                if (task.cost == lmax) ++longTasks;
            } else if (s.kind == TraceEventKind::Inform && informed.insert(s.task).second) {
                const auto& task = taskCosts.at(s.task);
                --tasks;
                cost -= task.cost;
                if (task.cost == lmax) --longTasks;
            }
        }
        out.push_back({t, tasks, cost, longTasks});
    }
    return out;
}

void check_alignment(const std::vector<AlgPoint>& alg, const std::vector<OptPoint>& opt) {
    if (alg.size() != opt.size())
        throw validation_error("optimum curve does not cover the sampled instants");
    for (std::size_t i = 0; i < alg.size(); ++i)
        if (!(alg[i].time == opt[i].time))
            throw validation_error("optimum curve instant " + opt[i].time.str() +
                                   " does not match sampled instant " + alg[i].time.str());
}

// Pending values of a replayed reference trace at given instants.
std::vector<OptPoint> replay_curve(const RunTrace& reference, const std::vector<TimePoint>& instants) {
    auto taskCosts = reference.pattern.task_map();
    const std::int64_t lmax = reference.pattern.params.lmax;
    std::vector<OptPoint> out;
    out.reserve(instants.size());
    std::set<std::int64_t> informed;
    std::int64_t tasks = 0, cost = 0, longTasks = 0;
    std::size_t row = 0;
    for (const auto& t : instants) {
        for (; row < reference.samples.size() && reference.samples[row].time <= t; ++row) {
            const auto& s = reference.samples[row];
            if (s.kind == TraceEventKind::Inject) {
                ++tasks;
                cost += taskCosts.at(s.task).cost;
                if (taskCosts.at(s.task).cost == lmax) ++longTasks;
            } else if (s.kind == TraceEventKind::Inform && informed.insert(s.task).second) {
                --tasks;
                cost -= taskCosts.at(s.task).cost;
                if (taskCosts.at(s.task).cost == lmax) --longTasks;
            }
        }
        out.push_back({t, cost, tasks, longTasks});
    }
    return out;
}

using SlackAt = Rational (*)(const AlgPoint&, const OptPoint&, const SystemParams&, const Rational&);

BoundReport run_check(const std::string& name,
                      const std::vector<AlgPoint>& alg,
                      const std::vector<OptPoint>& opt,
                      const SystemParams& params,
                      const Rational& extra,
                      SlackAt slackAt,
                      const std::string& reference) {
    BoundReport report;
    report.bound = name;
    report.reference = reference;
    bool first = true;
    for (std::size_t i = 0; i < alg.size(); ++i) {
        Rational slack = slackAt(alg[i], opt[i], params, extra);
        if (first || slack < report.worstSlack) report.worstSlack = slack;
        first = false;
        if (slack < Rational(0) && !report.violatingTime) {
            report.holds = false;
            report.violatingTime = alg[i].time;
        }
    }
    return report;
}

void require_two_cost(const AdversarialPattern& pattern, const char* who) {
    for (const auto& t : pattern.tasks())
        if (t.cost != pattern.params.lmin && t.cost != pattern.params.lmax)
            throw precondition_error(std::string(who) + " verification requires every task cost in {lmin, lmax}");
}

std::int64_t distinct_cost_count(const AdversarialPattern& pattern) {
    std::set<std::int64_t> costs;
    for (const auto& t : pattern.tasks()) costs.insert(t.cost);
    return static_cast<std::int64_t>(costs.size());
}

std::vector<BoundReport> lis_reports(const RunTrace& alg,
                                     const std::vector<OptPoint>& opt,
                                     const std::string& reference) {
    const auto& params = alg.pattern.params;
    if (params.speedup * Rational(params.lmin) < Rational(params.lmax))
        throw precondition_error("lis verification requires speedup >= lmax/lmin");
    if (Rational(params.beta) * Rational(params.lmin) < Rational(params.lmax))
        throw precondition_error("lis verification requires beta >= lmax/lmin");
    auto series = alg_series(alg);
    check_alignment(series, opt);
    const std::int64_t additive = params.beta * params.n * params.n + 3 * params.n;
    std::vector<BoundReport> out;
    out.push_back(run_check(
        "lis-tasks", series, opt, params, Rational(additive),
        [](const AlgPoint& a, const OptPoint& o, const SystemParams&, const Rational& add) {
            return Rational(o.minPendingTasks) + add - Rational(a.tasks);
        },
        reference));
    out.push_back(run_check(
        "lis-cost", series, opt, params, Rational(additive),
        [](const AlgPoint& a, const OptPoint& o, const SystemParams& p, const Rational& add) {
            Rational ratio(p.lmax, p.lmin);
            return ratio * (Rational(o.minPendingCost) + add) - Rational(a.cost);
        },
        reference));
    return out;
}

std::vector<BoundReport> burst_reports(const RunTrace& alg,
                                       const std::vector<OptPoint>& opt,
                                       const std::string& reference) {
    const auto& params = alg.pattern.params;
    require_two_cost(alg.pattern, "burst");
    std::int64_t gamma = gamma_value(params.lmin, params.lmax, params.speedup);
    bool inRange = Rational(gamma * params.lmin + params.lmax) <= params.speedup * Rational(params.lmax) &&
                   params.speedup * Rational(params.lmin) < Rational(params.lmax);
    if (!inRange)
        throw precondition_error("burst verification requires (gamma*lmin+lmax)/lmax <= speedup < lmax/lmin");

    auto series = alg_series(alg);
    check_alignment(series, opt);
    // ceil(lmax/(s*lmin)) exactly: ceil((lmax*s.den)/(s.num*lmin))
    Rational perSpan = Rational(params.lmax) / (params.speedup * Rational(params.lmin));
    const std::int64_t ceilSpan = perSpan.ceil();
    const std::int64_t n = params.n;

    std::vector<BoundReport> out;
    out.push_back(run_check(
        "burst-tasks", series, opt, params, Rational(2 * n * n + (3 + ceilSpan) * n),
        [](const AlgPoint& a, const OptPoint& o, const SystemParams&, const Rational& add) {
            return Rational(o.minPendingTasks) + add - Rational(a.tasks);
        },
        reference));
    const std::int64_t costAdd = params.lmax * (n * n + 2 * n) +
                                 params.lmin * (n * n + (1 + ceilSpan) * n);
    out.push_back(run_check(
        "burst-cost", series, opt, params, Rational(costAdd),
        [](const AlgPoint& a, const OptPoint& o, const SystemParams&, const Rational& add) {
            return Rational(o.minPendingCost) + add - Rational(a.cost);
        },
        reference));
    out.push_back(run_check(
        "burst-long-backlog", series, opt, params, Rational(n * n + 2 * n),
        [](const AlgPoint& a, const OptPoint& o, const SystemParams&, const Rational& add) {
            return Rational(o.minPendingLongTasks) + add - Rational(a.longTasks);
        },
        reference));
    return out;
}

std::vector<BoundReport> laf_reports(const RunTrace& alg,
                                     const std::vector<OptPoint>& opt,
                                     const std::string& reference) {
    const auto& params = alg.pattern.params;
    if (params.speedup < Rational(7, 2))
        throw precondition_error("laf verification requires speedup >= 7/2");
    if (Rational(params.beta) * Rational(params.lmin) < Rational(params.lmax))
        throw precondition_error("laf verification requires beta >= lmax/lmin");
    std::int64_t k = distinct_cost_count(alg.pattern);
    if (k > 16) throw precondition_error("laf verification cost alphabet too large (k > 16)");
    if (k == 0) k = 1;

    auto series = alg_series(alg);
    check_alignment(series, opt);
    Rational additive = Rational(2 * params.lmax * k * params.beta * params.n * params.n) +
                        Rational(2 * params.n * params.lmax) +
                        Rational(3 * params.n) * div_by_speedup(params.lmax, params.speedup);

    std::vector<BoundReport> out;
    out.push_back(run_check(
        "laf-cost", series, opt, params, additive,
        [](const AlgPoint& a, const OptPoint& o, const SystemParams&, const Rational& add) {
            return Rational(o.minPendingCost) + add - Rational(a.cost);
        },
        reference));
    out.push_back(run_check(
        "laf-tasks", series, opt, params, additive,
        [](const AlgPoint& a, const OptPoint& o, const SystemParams& p, const Rational& add) {
            Rational ratio(p.lmax, p.lmin);
            return ratio * Rational(o.minPendingTasks) + add / Rational(p.lmin) - Rational(a.tasks);
        },
        reference));
    return out;
}

std::vector<OptPoint> curve_from_replay(const RunTrace& alg, const RunTrace& optReplay) {
    if (!(alg.pattern == optReplay.pattern))
        throw validation_error("scheduler trace and reference trace come from different patterns");
    return replay_curve(optReplay, verification_instants(alg));
}

} // namespace

std::vector<BoundReport> verify_lis_bounds(const RunTrace& alg, const std::vector<OptPoint>& opt) {
    return lis_reports(alg, opt, "witness-exact");
}

std::vector<BoundReport> verify_lis_bounds(const RunTrace& alg, const RunTrace& optReplay) {
    return lis_reports(alg, curve_from_replay(alg, optReplay), "replay");
}

std::vector<BoundReport> verify_burst_bounds(const RunTrace& alg, const std::vector<OptPoint>& opt) {
    return burst_reports(alg, opt, "witness-exact");
}

std::vector<BoundReport> verify_burst_bounds(const RunTrace& alg, const RunTrace& optReplay) {
    return burst_reports(alg, curve_from_replay(alg, optReplay), "replay");
}

std::vector<BoundReport> verify_laf_bound(const RunTrace& alg, const std::vector<OptPoint>& opt) {
    return laf_reports(alg, opt, "witness-exact");
}

std::vector<BoundReport> verify_laf_bound(const RunTrace& alg, const RunTrace& optReplay) {
    return laf_reports(alg, curve_from_replay(alg, optReplay), "replay");
}

std::vector<RedundancyIncident> redundancy_audit(const RunTrace& trace,
                                                 AuditClass mode,
                                                 std::int64_t threshold) {
    if (threshold < 1) throw precondition_error("audit threshold must be at least 1");
    auto taskCosts = trace.pattern.task_map();

    // Post-instant class sizes, reconstructed from inject/inform rows.
    struct SizePoint {
        TimePoint time;
        std::map<std::int64_t, std::int64_t> byCost;
        std::int64_t whole = 0;
    };
    std::vector<SizePoint> sizes;
    {
        std::set<std::int64_t> informed;
        std::map<std::int64_t, std::int64_t> byCost;
        std::int64_t whole = 0;
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            const auto& s = trace.samples[i];
            if (s.kind == TraceEventKind::Inject) {
                ++byCost[taskCosts.at(s.task).cost];
                ++whole;
            } else if (s.kind == TraceEventKind::Inform && informed.insert(s.task).second) {
                --byCost[taskCosts.at(s.task).cost];
                --whole;
            }
            bool lastOfInstant =
                i + 1 == trace.samples.size() || !(trace.samples[i + 1].time == s.time);
            if (lastOfInstant) sizes.push_back({s.time, byCost, whole});
        }
    }

    auto classOkThroughout = [&](const TimePoint& from, const TimePoint& to, std::int64_t cost) {
        // post-instant sizes on [from, to): the value entering `from` is the
        // point at `from` itself (execution windows begin at sampled instants)
        for (const auto& p : sizes) {
            if (p.time < from || !(p.time < to)) continue;
            std::int64_t size = mode == AuditClass::WholeList ? p.whole : [&] {
                auto it = p.byCost.find(cost);
                return it == p.byCost.end() ? std::int64_t{0} : it->second;
            }();
            if (size < threshold) return false;
        }
        return true;
    };

    std::map<std::int64_t, std::vector<const TraceReport*>> byTask;
    for (const auto& r : trace.reports) byTask[r.task].push_back(&r);

    std::vector<RedundancyIncident> out;
    for (const auto& [task, reports] : byTask) {
        if (reports.size() < 2) continue;
        const std::int64_t cost = taskCosts.at(task).cost;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            for (std::size_t j = i + 1; j < reports.size(); ++j) {
                TimePoint from = min(reports[i]->start, reports[j]->start);
                TimePoint to = max(reports[i]->time, reports[j]->time);
                if (!classOkThroughout(from, to, cost)) continue;
                RedundancyIncident inc;
                inc.task = task;
                inc.procA = reports[i]->proc;
                inc.startA = reports[i]->start;
                inc.endA = reports[i]->time;
                inc.procB = reports[j]->proc;
                inc.startB = reports[j]->start;
                inc.endB = reports[j]->time;
                out.push_back(inc);
            }
        }
    }
    return out;
}

} // namespace crashsched
