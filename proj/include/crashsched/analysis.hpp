#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crashsched/core.hpp"
#include "crashsched/offline.hpp"

namespace crashsched {

struct BoundReport {
    std::string bound;
    bool holds = true;
    Rational worstSlack;                    // min over sampled instants of bound minus actual
    std::optional<TimePoint> violatingTime; // earliest instant with negative slack
    std::string reference;                  // "witness-exact" or "replay"
};

std::string bound_report_to_json(const BoundReport& report);

// Additive-bound checks at every sampled instant of the scheduler trace
// (instant 0 is always sampled). The OptPoint overloads expect the exact
// optimum curve evaluated at exactly those instants; the RunTrace overloads
// compare against a replayed explicit schedule instead, which is a weaker
// reference (its pending is only an upper bound on the optimum).
//
// lis, speedup >= lmax/lmin, beta >= lmax/lmin:
//   tasks <= opt_tasks + beta*n^2 + 3n
//   cost  <= (lmax/lmin) * (opt_cost + beta*n^2 + 3n)
std::vector<BoundReport> verify_lis_bounds(const RunTrace& alg, const std::vector<OptPoint>& opt);
std::vector<BoundReport> verify_lis_bounds(const RunTrace& alg, const RunTrace& optReplay);

// burst, two-cost pattern, (gamma*lmin+lmax)/lmax <= speedup < lmax/lmin:
//   tasks <= opt_tasks + 2n^2 + (3 + ceil(lmax/(s*lmin)))*n
//   cost  <= opt_cost + lmax*(n^2+2n) + lmin*(n^2 + (1 + ceil(lmax/(s*lmin)))*n)
//   long backlog <= opt_long_backlog + n^2 + 2n
std::vector<BoundReport> verify_burst_bounds(const RunTrace& alg, const std::vector<OptPoint>& opt);
std::vector<BoundReport> verify_burst_bounds(const RunTrace& alg, const RunTrace& optReplay);

// laf, speedup >= 7/2, beta >= lmax/lmin, k distinct costs:
//   cost  <= opt_cost + 2*lmax*k*beta*n^2 + 2n*lmax + 3n*lmax/s
//   tasks <= (lmax/lmin)*opt_tasks + (same additive)/lmin
std::vector<BoundReport> verify_laf_bound(const RunTrace& alg, const std::vector<OptPoint>& opt);
std::vector<BoundReport> verify_laf_bound(const RunTrace& alg, const RunTrace& optReplay);

// Sampling instants a verifier uses for this trace: its distinct sample
// times, plus 0.
std::vector<TimePoint> verification_instants(const RunTrace& trace);

enum class AuditClass {
    WholeList, // threshold applies to the whole pending set (lis)
    CostClass  // threshold applies to the duplicated task's cost class (burst, laf)
};

struct RedundancyIncident {
    std::int64_t task = 0;
    int procA = 0;
    TimePoint startA, endA;
    int procB = 0;
    TimePoint startB, endB;
};

// Finds pairs of completed executions of one task whose combined span lies
// inside a region where the relevant pending class never drops below
// `threshold`. Inside such a region the selection rules hand distinct
// processors distinct tasks, so a duplicate there indicates a scheduler bug.
std::vector<RedundancyIncident> redundancy_audit(const RunTrace& trace,
                                                 AuditClass mode,
                                                 std::int64_t threshold);

} // namespace crashsched
