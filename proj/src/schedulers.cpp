#include "crashsched/schedulers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace crashsched {

std::int64_t gamma_value(std::int64_t lmin, std::int64_t lmax, const Rational& speedup) {
    if (lmin < 1 || lmin > lmax) throw precondition_error("gamma needs 1 <= lmin <= lmax");
    if (speedup.num() <= 0) throw precondition_error("gamma needs a positive speedup");
    // lmax <= s*lmin: a sped-up processor covers the longest task within one
    // short-task span, nothing to catch up.
    if (Rational(lmax) <= speedup * Rational(lmin)) return 0;
    if (speedup <= Rational(1))
        throw precondition_error("gamma undefined: speedup 1 with lmax > lmin");
    // ceil((lmax - s*lmin) / ((s-1)*lmin)) with s = p/q:
    // = ceil((q*lmax - p*lmin) / ((p-q)*lmin)), both parts positive here.
    __int128 num = static_cast<__int128>(speedup.den()) * lmax -
                   static_cast<__int128>(speedup.num()) * lmin;
    __int128 den = static_cast<__int128>(speedup.num() - speedup.den()) * lmin;
    __int128 g = (num + den - 1) / den;
    return static_cast<std::int64_t>(g);
}

bool non_competitive_check(std::int64_t lmin, std::int64_t lmax, const Rational& speedup) {
    std::int64_t g = gamma_value(lmin, lmax, speedup);
    bool belowRatio = speedup * Rational(lmin) < Rational(lmax);
    bool belowBurstThreshold = speedup * Rational(lmax) < Rational(g) * Rational(lmin) + Rational(lmax);
    return belowRatio && belowBurstThreshold;
}

double SpeedupValue::to_double() const {
    return base.to_double() + coeff.to_double() * std::sqrt(radicand.to_double());
}

int SpeedupValue::compare(const Rational& r) const {
    Rational d = r - base; // compare coeff*sqrt(radicand) against d
    int signL = (coeff.is_zero() || radicand.is_zero()) ? 0 : (coeff > Rational(0) ? 1 : -1);
    int signD = d > Rational(0) ? 1 : (d < Rational(0) ? -1 : 0);
    if (signL != signD) return signL > signD ? 1 : -1;
    if (signL == 0) return 0;
    Rational lhsSq = coeff * coeff * radicand;
    Rational rhsSq = d * d;
    int c = lhsSq.compare(rhsSq);
    return signL > 0 ? c : -c;
}

std::string SpeedupValue::str() const {
    if (is_rational()) return base.str();
    return base.str() + " + " + coeff.str() + "*sqrt(" + radicand.str() + ")";
}

SufficientSpeedup sufficient_speedup(std::int64_t lmin, std::int64_t lmax) {
    if (lmin < 1 || lmin > lmax) throw precondition_error("sufficient_speedup needs 1 <= lmin <= lmax");
    Rational ratio(lmax, lmin);
    SufficientSpeedup out;
    out.nonCompetitiveBelow = Rational(2) - Rational(lmin, lmax);
    // ratio <= (1+sqrt(5))/2  <=>  (2*ratio - 1)^2 <= 5
    Rational r = Rational(2) * ratio - Rational(1);
    if (r * r <= Rational(5)) {
        out.speedup = SpeedupValue{ratio, Rational(0), Rational(0)};
    } else {
        out.speedup = SpeedupValue{Rational(1), Rational(1), Rational(1) - Rational(lmin, lmax)};
    }
    return out;
}

std::optional<Rational> burst_min_speedup(std::int64_t lmin, std::int64_t lmax) {
    if (lmin < 1 || lmin > lmax) throw precondition_error("burst_min_speedup needs 1 <= lmin <= lmax");
    if (lmin == lmax) return std::nullopt;
    Rational ratio(lmax, lmin);
    auto admissible = [&](const Rational& s) {
        if (!(s < ratio) || s <= Rational(1)) return false;
        std::int64_t g = gamma_value(lmin, lmax, s);
        return Rational(g) * Rational(lmin) + Rational(lmax) <= s * Rational(lmax);
    };
    std::optional<Rational> best;
    auto consider = [&](const Rational& s) {
        if (admissible(s) && (!best || s < *best)) best = s;
    };
    // Minimal admissible speedups sit either where the threshold is tight,
    // s = (g*lmin+lmax)/lmax, or where gamma steps down,
    // s = (k*lmin+lmax)/((k+1)*lmin).
    for (std::int64_t g = 1;; ++g) {
        Rational s(g * lmin + lmax, lmax);
        if (!(s < ratio)) break;
        consider(s);
    }
    for (std::int64_t k = 0; k <= ceil_div(lmax, lmin) + 1; ++k)
        consider(Rational(k * lmin + lmax, (k + 1) * lmin));
    return best;
}

std::size_t lis_select(std::size_t size, int proc, int n, std::int64_t beta) {
    if (size == 0) throw precondition_error("selection from an empty pending list");
    __int128 rank = static_cast<__int128>(proc) * beta * n;
    return static_cast<std::size_t>(rank % static_cast<__int128>(size));
}

namespace {

std::size_t burst_index(std::size_t size, int proc, int n) {
    __int128 rank = static_cast<__int128>(proc) * n;
    return static_cast<std::size_t>(rank % static_cast<__int128>(size));
}

} // namespace

BurstChoice burst_select(const std::vector<TaskSpec>& shortList,
                         const std::vector<TaskSpec>& longList,
                         int proc,
                         const SystemParams& params,
                         std::int64_t gamma,
                         const BurstMemory& memory) {
    for (const auto& t : shortList)
        if (t.cost != params.lmin)
            throw precondition_error("burst: task " + std::to_string(t.id) + " cost " +
                                     std::to_string(t.cost) + " not in {lmin, lmax}");
    for (const auto& t : longList)
        if (t.cost != params.lmax)
            throw precondition_error("burst: task " + std::to_string(t.id) + " cost " +
                                     std::to_string(t.cost) + " not in {lmin, lmax}");
    if (shortList.empty() && longList.empty())
        throw precondition_error("burst selection from an empty pending list");

    const std::int64_t square = static_cast<std::int64_t>(params.n) * params.n;
    const auto S = static_cast<std::int64_t>(shortList.size());
    const auto L = static_cast<std::int64_t>(longList.size());

    bool pickShort;
    if (S < square && L < square) {
        pickShort = !memory.prevWasMin;           // alternate classes while both lists are small
        if (pickShort && shortList.empty()) pickShort = false;
        if (!pickShort && longList.empty()) pickShort = true;
    } else if (S >= square && L < square) {
        pickShort = true;
    } else if (S < square && L >= square) {
        pickShort = false;
    } else {
        pickShort = memory.streak != gamma;       // burst one long task after gamma short ones
    }

    const auto& list = pickShort ? shortList : longList;
    TaskSpec task = list[burst_index(list.size(), proc, params.n)];

    BurstChoice out{task, memory};
    if (pickShort) {
        out.memory.streak = std::min(memory.streak + 1, gamma);
        out.memory.prevWasMin = true;
    } else {
        out.memory.streak = 0;
        out.memory.prevWasMin = false;
    }
    return out;
}

TaskSpec laf_select(const std::map<std::int64_t, std::vector<TaskSpec>>& byCost,
                    int proc,
                    const SystemParams& params,
                    const LafMemory& memory) {
    const std::int64_t threshold = params.beta * params.n * params.n;
    for (auto it = byCost.rbegin(); it != byCost.rend(); ++it) {
        if (it->first > memory.total) continue;
        if (static_cast<std::int64_t>(it->second.size()) < threshold) continue;
        __int128 rank = static_cast<__int128>(proc) * params.beta * params.n;
        return it->second[static_cast<std::size_t>(rank % static_cast<__int128>(it->second.size()))];
    }
    // No class is both filled and already "paid for": take the oldest task.
    const TaskSpec* oldest = nullptr;
    for (const auto& [cost, list] : byCost)
        for (const auto& t : list)
            if (!oldest || t.arrival < oldest->arrival ||
                (t.arrival == oldest->arrival &&
                 (t.cost < oldest->cost || (t.cost == oldest->cost && t.id < oldest->id))))
                oldest = &t;
    if (!oldest) throw precondition_error("laf selection from an empty pending list");
    return *oldest;
}

SchedulerKind scheduler_kind_from_name(const std::string& name) {
    if (name == "lis") return SchedulerKind::Lis;
    if (name == "burst") return SchedulerKind::Burst;
    if (name == "laf") return SchedulerKind::Laf;
    if (name == "largest") return SchedulerKind::LargestFirst;
    if (name == "smallest") return SchedulerKind::SmallestFirst;
    throw validation_error("unknown scheduler \"" + name + "\"");
}

const char* scheduler_name(SchedulerKind kind) {
    switch (kind) {
        case SchedulerKind::Lis: return "lis";
        case SchedulerKind::Burst: return "burst";
        case SchedulerKind::Laf: return "laf";
        case SchedulerKind::LargestFirst: return "largest";
        case SchedulerKind::SmallestFirst: return "smallest";
    }
    throw internal_error("unknown scheduler kind");
}

std::vector<TaskSpec> sorted_by_arrival_cost_id(std::vector<TaskSpec> tasks) {
    std::stable_sort(tasks.begin(), tasks.end(), [](const TaskSpec& a, const TaskSpec& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.cost != b.cost) return a.cost < b.cost;
        return a.id < b.id;
    });
    return tasks;
}

namespace {

class LisPolicy final : public SchedulerPolicy {
public:
    explicit LisPolicy(SystemParams params) : params_(params) {}
    TaskSpec pick(const std::vector<TaskSpec>& snapshot, int proc, SchedulerMemory&) override {
        auto sorted = sorted_by_arrival_cost_id(snapshot);
        return sorted[lis_select(sorted.size(), proc, params_.n, params_.beta)];
    }

private:
    SystemParams params_;
};

class BurstPolicy final : public SchedulerPolicy {
public:
    BurstPolicy(SystemParams params, std::int64_t gamma) : params_(params), gamma_(gamma) {}
    SchedulerMemory initial_memory() const override { return BurstMemory{}; }
    TaskSpec pick(const std::vector<TaskSpec>& snapshot, int proc, SchedulerMemory& memory) override {
        auto sorted = sorted_by_arrival_cost_id(snapshot);
        std::vector<TaskSpec> shortList, longList;
        for (const auto& t : sorted) {
            if (t.cost == params_.lmin && params_.lmin != params_.lmax)
                shortList.push_back(t);
            else
                longList.push_back(t);
        }
        auto& mem = std::get<BurstMemory>(memory);
        auto choice = burst_select(shortList, longList, proc, params_, gamma_, mem);
        mem = choice.memory;
        return choice.task;
    }

private:
    SystemParams params_;
    std::int64_t gamma_;
};

class LafPolicy final : public SchedulerPolicy {
public:
    explicit LafPolicy(SystemParams params) : params_(params) {}
    SchedulerMemory initial_memory() const override { return LafMemory{}; }
    TaskSpec pick(const std::vector<TaskSpec>& snapshot, int proc, SchedulerMemory& memory) override {
        std::map<std::int64_t, std::vector<TaskSpec>> byCost;
        for (const auto& t : sorted_by_arrival_cost_id(snapshot)) byCost[t.cost].push_back(t);
        return laf_select(byCost, proc, params_, std::get<LafMemory>(memory));
    }
    void on_informed(const TaskSpec& task, SchedulerMemory& memory) override {
        std::get<LafMemory>(memory).total += task.cost;
    }

private:
    SystemParams params_;
};

class ExtremeCostPolicy final : public SchedulerPolicy {
public:
    explicit ExtremeCostPolicy(bool largest) : largest_(largest) {}
    TaskSpec pick(const std::vector<TaskSpec>& snapshot, int proc, SchedulerMemory&) override {
        (void)proc;
        const TaskSpec* best = nullptr;
        for (const auto& t : snapshot) {
            if (!best) {
                best = &t;
                continue;
            }
            bool better;
            if (t.cost != best->cost)
                better = largest_ ? t.cost > best->cost : t.cost < best->cost;
            else if (t.arrival != best->arrival)
                better = t.arrival < best->arrival;
            else
                better = t.id < best->id;
            if (better) best = &t;
        }
        if (!best) throw precondition_error("selection from an empty pending list");
        return *best;
    }

private:
    bool largest_;
};

} // namespace

std::unique_ptr<SchedulerPolicy> make_scheduler(SchedulerKind kind,
                                                const SystemParams& params,
                                                const AdversarialPattern& pattern) {
    auto require_beta = [&](const char* who) {
        std::int64_t floor = ceil_div(params.lmax, params.lmin);
        if (params.beta < floor)
            throw precondition_error(std::string(who) + " requires beta >= ceil(lmax/lmin) = " +
                                     std::to_string(floor) + ", got " + std::to_string(params.beta));
    };
    switch (kind) {
        case SchedulerKind::Lis:
            require_beta("lis");
            return std::make_unique<LisPolicy>(params);
        case SchedulerKind::Laf:
            require_beta("laf");
            return std::make_unique<LafPolicy>(params);
        case SchedulerKind::Burst: {
            for (const auto& e : pattern.events)
                if (e.kind == EventKind::Inject && e.task.cost != params.lmin && e.task.cost != params.lmax)
                    throw precondition_error("burst requires every task cost in {" +
                                             std::to_string(params.lmin) + ", " +
                                             std::to_string(params.lmax) + "}; task " +
                                             std::to_string(e.task.id) + " has cost " +
                                             std::to_string(e.task.cost));
            std::int64_t gamma;
            try {
                gamma = gamma_value(params.lmin, params.lmax, params.speedup);
            } catch (const precondition_error&) {
                gamma = -1;
            }
            bool inRange = gamma >= 0 &&
                           Rational(gamma) * Rational(params.lmin) + Rational(params.lmax) <=
                               params.speedup * Rational(params.lmax) &&
                           params.speedup * Rational(params.lmin) < Rational(params.lmax);
            if (!inRange) {
                std::ostringstream msg;
                msg << "burst requires (gamma*lmin+lmax)/lmax <= speedup < lmax/lmin";
                if (gamma >= 0)
                    msg << "; with gamma=" << gamma << " that is ["
                        << Rational(gamma * params.lmin + params.lmax, params.lmax).str() << ", "
                        << Rational(params.lmax, params.lmin).str() << ")";
                msg << "; got speedup " << params.speedup.str();
                throw precondition_error(msg.str());
            }
            return std::make_unique<BurstPolicy>(params, gamma);
        }
        case SchedulerKind::LargestFirst:
            return std::make_unique<ExtremeCostPolicy>(true);
        case SchedulerKind::SmallestFirst:
            return std::make_unique<ExtremeCostPolicy>(false);
    }
    throw internal_error("unknown scheduler kind");
}

} // namespace crashsched
