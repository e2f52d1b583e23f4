#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crashsched/core.hpp"

namespace crashsched {

// Smallest number of short tasks a speed-s processor can run on top of one
// long task while an unsped processor running only short tasks cannot get
// ahead of it: max(ceil((lmax - s*lmin) / ((s-1)*lmin)), 0). Undefined (throws
// precondition_error) when s <= 1 and lmax > s*lmin.
std::int64_t gamma_value(std::int64_t lmin, std::int64_t lmax, const Rational& speedup);

// True iff no deterministic scheduler can be competitive at this speedup:
// s < lmax/lmin and s < (gamma*lmin + lmax) / lmax.
bool non_competitive_check(std::int64_t lmin, std::int64_t lmax, const Rational& speedup);

// Exact value of the form base + coeff * sqrt(radicand), radicand >= 0.
// Supports exact comparison against rationals, which keeps threshold
// properties testable without floating point.
struct SpeedupValue {
    Rational base;
    Rational coeff;    // 0 for plain rationals
    Rational radicand; // under the square root

    bool is_rational() const { return coeff.is_zero() || radicand.is_zero(); }
    double to_double() const;
    // -1/0/1 against a rational, exact.
    int compare(const Rational& r) const;
    bool operator<(const Rational& r) const { return compare(r) < 0; }
    bool operator>=(const Rational& r) const { return compare(r) >= 0; }
    std::string str() const;
};

struct SufficientSpeedup {
    SpeedupValue speedup;          // running at least this fast admits a competitive scheduler
    Rational nonCompetitiveBelow;  // 2 - lmin/lmax: below this, non-competitiveness is guaranteed
};

// ratio <= (1+sqrt(5))/2 gives speedup = lmax/lmin; otherwise 1 + sqrt(1 - lmin/lmax).
SufficientSpeedup sufficient_speedup(std::int64_t lmin, std::int64_t lmax);

// Smallest rational speedup admitted by the two-cost burst scheduler for this
// cost pair, i.e. the smallest s with (gamma(s)*lmin + lmax)/lmax <= s < lmax/lmin.
// nullopt when that range is empty (cost ratio at or below the golden ratio).
std::optional<Rational> burst_min_speedup(std::int64_t lmin, std::int64_t lmax);

// Selection index of processor `proc` (1-based) into a pending list of size
// `size`: (proc * beta * n) mod size. Pure; the list must be sorted by
// (arrival, cost, id) by the caller.
std::size_t lis_select(std::size_t size, int proc, int n, std::int64_t beta);

// Per-processor scheduler state, wiped by a restart.
struct BurstMemory {
    std::int64_t streak = 0;     // consecutive short tasks chosen this cycle run, capped at gamma
    bool prevWasMin = false;     // cost class of the previously chosen task
    bool operator==(const BurstMemory&) const = default;
};

struct LafMemory {
    std::int64_t total = 0; // cost this processor reported since its last restart
    bool operator==(const LafMemory&) const = default;
};

using SchedulerMemory = std::variant<std::monostate, BurstMemory, LafMemory>;

struct BurstChoice {
    TaskSpec task;
    BurstMemory memory;
};

// Two-cost selection rule. shortList/longList hold the pending tasks of cost
// lmin and lmax, sorted by (arrival, id); at least one must be non-empty.
// `gamma` caps the streak counter. Throws precondition_error if a task cost
// is outside {lmin, lmax}.
BurstChoice burst_select(const std::vector<TaskSpec>& shortList,
                         const std::vector<TaskSpec>& longList,
                         int proc,
                         const SystemParams& params,
                         std::int64_t gamma,
                         const BurstMemory& memory);

// Largest-fitting-cost rule: among cost classes with list size >= beta*n^2
// and cost <= memory.total, pick from the class of largest cost at index
// (proc*beta*n) mod size; with no qualifying class, fall back to the globally
// oldest pending task (ties by cost then id).
TaskSpec laf_select(const std::map<std::int64_t, std::vector<TaskSpec>>& byCost,
                    int proc,
                    const SystemParams& params,
                    const LafMemory& memory);

enum class SchedulerKind { Lis, Burst, Laf, LargestFirst, SmallestFirst };

struct SchedulerSpec {
    SchedulerKind kind = SchedulerKind::Lis;
    bool operator==(const SchedulerSpec&) const = default;
};

SchedulerKind scheduler_kind_from_name(const std::string& name);
const char* scheduler_name(SchedulerKind kind);

// Stateless decision object driven by the engine. Memory is owned per
// processor by the engine and reset on restart.
class SchedulerPolicy {
public:
    virtual ~SchedulerPolicy() = default;
    virtual SchedulerMemory initial_memory() const { return std::monostate{}; }
    // snapshot is the repository pending set in (arrival, injection) order.
    virtual TaskSpec pick(const std::vector<TaskSpec>& snapshot, int proc, SchedulerMemory& memory) = 0;
    virtual void on_informed(const TaskSpec& task, SchedulerMemory& memory) { (void)task; (void)memory; }
};

// Throws precondition_error when the scheduler's parameter requirements do
// not hold (beta floor for lis/laf, two-cost pattern and speedup range for burst).
std::unique_ptr<SchedulerPolicy> make_scheduler(SchedulerKind kind,
                                                const SystemParams& params,
                                                const AdversarialPattern& pattern);

// (arrival, cost, id) ordering used by the selection rules.
std::vector<TaskSpec> sorted_by_arrival_cost_id(std::vector<TaskSpec> tasks);

} // namespace crashsched
