#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crashsched/analysis.hpp"
#include "crashsched/core.hpp"
#include "crashsched/schedulers.hpp"

namespace crashsched {

// Public-domain splitmix64 step, fixed here so seeded runs reproduce across
// platforms and languages.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    // next() reduced mod bound; bound must be positive.
    std::uint64_t below(std::uint64_t bound);
};

// Per-trial stream seed: one splitmix step of seed XOR (trial+1) * odd constant.
std::uint64_t fuzz_trial_seed(std::uint64_t seed, int trial);

struct FuzzOptions {
    SchedulerKind scheduler = SchedulerKind::Lis;
    int maxN = 2;     // oracle budget caps this at 2
    int maxTasks = 8; // oracle budget caps this at 8
    int trials = 100;
    std::uint64_t seed = 0;
};

struct FuzzViolation {
    int trial = 0;
    AdversarialPattern pattern;
    std::vector<BoundReport> reports;
    std::size_t incidents = 0;
};

struct FuzzResult {
    int trialsRun = 0;
    std::int64_t totalIncidents = 0;
    std::optional<FuzzViolation> firstViolation; // empty when every trial held
};

// Deterministic pattern for one trial inside the scheduler's verified regime:
// lis at speedup lmax/lmin with two costs up to 5; burst at its minimal
// admissible speedup over cost pairs above the golden ratio; laf at 7/2 with
// up to 3 distinct costs on one processor. beta is always ceil(lmax/lmin).
AdversarialPattern fuzz_pattern(SchedulerKind kind, int maxN, int maxTasks, std::uint64_t trialSeed);

struct TrialCheck {
    std::vector<BoundReport> reports;
    std::vector<RedundancyIncident> incidents;
};

// Exact optimum curve at the trace's sampled instants, the scheduler's bound
// verifier, and the redundancy audit at its class threshold, in one call.
TrialCheck check_trace(SchedulerKind kind, const RunTrace& trace);

// Runs seeded trials, stopping at the first violated bound or redundancy
// incident. Throws budget_error when maxN/maxTasks exceed the oracle budget.
FuzzResult fuzz_run(const FuzzOptions& options);

} // namespace crashsched
