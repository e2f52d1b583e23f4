#include "crashsched/repository.hpp"

#include <algorithm>

namespace crashsched {

bool Repository::inform(std::int64_t taskId) {
    if (!known_.count(taskId))
        throw validation_error("inform of never-injected task " + std::to_string(taskId));
    if (!informed_.insert(taskId).second) return false;
    auto it = std::find_if(pending_.begin(), pending_.end(),
                           [&](const TaskSpec& t) { return t.id == taskId; });
    if (it == pending_.end()) throw internal_error("informed task missing from pending set");
    pendingCost_ -= it->cost;
    pending_.erase(it);
    return true;
}

std::vector<int> Repository::inject(const TaskSpec& task) {
    if (!known_.insert(task.id).second)
        throw validation_error("duplicate injection of task " + std::to_string(task.id));
    pending_.push_back(task);
    pendingCost_ += task.cost;
    std::vector<int> released(blocked_.begin(), blocked_.end());
    blocked_.clear();
    return released;
}

std::optional<std::vector<TaskSpec>> Repository::get(int proc) {
    if (pending_.empty()) {
        blocked_.insert(proc);
        return std::nullopt;
    }
    return pending_;
}

void Repository::drop_blocked(int proc) { blocked_.erase(proc); }

InstantResult apply_instant(Repository& repo,
                            const std::vector<std::int64_t>& informs,
                            const std::vector<TaskSpec>& injects,
                            std::vector<int> getters) {
    InstantResult out;
    for (std::int64_t id : informs) repo.inform(id);
    for (const auto& task : injects) {
        auto released = repo.inject(task);
        out.releasedByInject.insert(out.releasedByInject.end(), released.begin(), released.end());
        for (int p : released) getters.push_back(p);
    }
    std::sort(getters.begin(), getters.end());
    getters.erase(std::unique(getters.begin(), getters.end()), getters.end());
    for (int p : getters) out.gets.push_back({p, repo.get(p)});
    return out;
}

} // namespace crashsched
