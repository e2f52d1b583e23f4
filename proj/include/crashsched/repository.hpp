#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "crashsched/core.hpp"

namespace crashsched {

// Central task store shared by all processors. Pending tasks are kept in
// injection order, which by construction is (arrival, injection sequence)
// order. Within one instant the ordering contract is: informs happen before
// injects, injects before gets; a get therefore sees same-instant injections
// but not tasks whose completion is informed at that same instant.
class Repository {
public:
    // Removes the task from pending. Returns false (and changes nothing) for
    // a duplicate inform of an already-informed id. Throws validation_error
    // for an id that was never injected.
    bool inform(std::int64_t taskId);

    // Appends to pending. Throws validation_error on a duplicate id. Returns
    // the processors released from blockedGetters by this injection, in id order.
    std::vector<int> inject(const TaskSpec& task);

    // Snapshot of the pending set, or nullopt when empty, in which case the
    // caller is registered in blockedGetters and will be released by the next
    // injection.
    std::optional<std::vector<TaskSpec>> get(int proc);

    // A crashed processor silently leaves blockedGetters.
    void drop_blocked(int proc);

    const std::vector<TaskSpec>& pending() const { return pending_; }
    std::int64_t pending_tasks() const { return static_cast<std::int64_t>(pending_.size()); }
    std::int64_t pending_cost() const { return pendingCost_; }
    bool was_informed(std::int64_t taskId) const { return informed_.count(taskId) > 0; }
    const std::set<int>& blocked_getters() const { return blocked_; }

private:
    std::vector<TaskSpec> pending_;
    std::set<std::int64_t> known_;
    std::set<std::int64_t> informed_;
    std::set<int> blocked_;
    std::int64_t pendingCost_ = 0;
};

// One processor's view of a full instant: did it get a snapshot, or block?
struct InstantGetResult {
    int proc = 0;
    std::optional<std::vector<TaskSpec>> snapshot;
};

struct InstantResult {
    std::vector<int> releasedByInject;
    std::vector<InstantGetResult> gets;
};

// Applies one instant's repository traffic in contract order to `repo`:
// all informs (in the given order), then all injects (authoring order), then
// one get per processor in `getters` (ascending id). Exercised directly by
// tests; the engine drives the same Repository method sequence.
InstantResult apply_instant(Repository& repo,
                            const std::vector<std::int64_t>& informs,
                            const std::vector<TaskSpec>& injects,
                            std::vector<int> getters);

} // namespace crashsched
