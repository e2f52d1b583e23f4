#include <doctest.h>

#include <set>

#include "crashsched/fuzz.hpp"
#include "crashsched/repository.hpp"
#include "helpers.hpp"

using namespace crashsched;
using namespace testutil;

namespace {

TaskSpec task(std::int64_t id, Rational arrival, std::int64_t cost) {
    TaskSpec t;
    t.id = id;
    t.arrival = arrival;
    t.cost = cost;
    return t;
}

} // namespace

TEST_CASE("inject then get returns pending in injection order") {
    Repository repo;
    repo.inject(task(2, Rational(0), 1));
    repo.inject(task(1, Rational(0), 2));
    auto snap = repo.get(7);
    REQUIRE(snap.has_value());
    REQUIRE(snap->size() == 2);
    CHECK((*snap)[0].id == 2);
    CHECK((*snap)[1].id == 1);
    CHECK(repo.pending_tasks() == 2);
    CHECK(repo.pending_cost() == 3);
}

TEST_CASE("inform removes a task exactly once") {
    Repository repo;
    repo.inject(task(1, Rational(0), 2));
    CHECK(repo.inform(1));
    CHECK(repo.pending_tasks() == 0);
    CHECK(repo.pending_cost() == 0);
    CHECK(repo.was_informed(1));
    CHECK_FALSE(repo.inform(1)); // duplicate: silent no-op
    CHECK_THROWS_AS(repo.inform(99), validation_error);
}

TEST_CASE("duplicate inject is a validation error") {
    Repository repo;
    repo.inject(task(1, Rational(0), 2));
    CHECK_THROWS_AS(repo.inject(task(1, Rational(1), 2)), validation_error);
    // even after the task completed, its id stays taken
    repo.inform(1);
    CHECK_THROWS_AS(repo.inject(task(1, Rational(2), 2)), validation_error);
}

TEST_CASE("empty get blocks until an injection releases it") {
    Repository repo;
    CHECK_FALSE(repo.get(2).has_value());
    CHECK_FALSE(repo.get(1).has_value());
    CHECK(repo.blocked_getters() == std::set<int>{1, 2});
    auto released = repo.inject(task(1, Rational(0), 1));
    CHECK(released == std::vector<int>{1, 2});
    CHECK(repo.blocked_getters().empty());
}

TEST_CASE("a crash drops the blocked getter") {
    Repository repo;
    CHECK_FALSE(repo.get(1).has_value());
    repo.drop_blocked(1);
    CHECK(repo.blocked_getters().empty());
    CHECK(repo.inject(task(1, Rational(0), 1)).empty());
}

TEST_CASE("apply_instant orders informs before injects before gets") {
    Repository repo;
    repo.inject(task(1, Rational(0), 2));
    repo.inject(task(2, Rational(0), 1));

    auto result = apply_instant(repo, {1}, {task(3, Rational(1), 2)}, {2, 1});
    REQUIRE(result.gets.size() == 2);
    // ascending processor order
    CHECK(result.gets[0].proc == 1);
    CHECK(result.gets[1].proc == 2);
    // both see the post-instant snapshot: task 1 informed, task 3 injected
    for (const auto& g : result.gets) {
        REQUIRE(g.snapshot.has_value());
        REQUIRE(g.snapshot->size() == 2);
        CHECK((*g.snapshot)[0].id == 2);
        CHECK((*g.snapshot)[1].id == 3);
    }
}

TEST_CASE("same-instant inject releases a processor blocked earlier in the instant") {
    Repository repo;
    repo.inject(task(1, Rational(0), 1));
    repo.inform(1);
    auto result = apply_instant(repo, {}, {task(2, Rational(1), 1)}, {1});
    REQUIRE(result.gets.size() == 1);
    REQUIRE(result.gets[0].snapshot.has_value());
    CHECK((*result.gets[0].snapshot)[0].id == 2);
}

TEST_CASE("random replay agrees with a set-difference model") {
    // model: pending == injected ids minus informed ids, in injection order
    SplitMix64 rng(2026);
    for (int round = 0; round < 50; ++round) {
        Repository repo;
        std::vector<std::int64_t> injected;
        std::set<std::int64_t> informed;
        std::int64_t nextId = 1;
        for (int step = 0; step < 200; ++step) {
            bool doInject = injected.size() == informed.size() || rng.below(2) == 0;
            if (doInject) {
                std::int64_t cost = 1 + static_cast<std::int64_t>(rng.below(5));
                repo.inject(task(nextId, Rational(step), cost));
                injected.push_back(nextId);
                ++nextId;
            } else {
                // pick a random not-yet-informed id
                std::vector<std::int64_t> live;
                for (auto id : injected)
                    if (!informed.count(id)) live.push_back(id);
                std::int64_t id = live[rng.below(live.size())];
                CHECK(repo.inform(id));
                informed.insert(id);
            }
            std::vector<std::int64_t> expect;
            for (auto id : injected)
                if (!informed.count(id)) expect.push_back(id);
            REQUIRE(repo.pending_tasks() == static_cast<std::int64_t>(expect.size()));
            for (std::size_t i = 0; i < expect.size(); ++i)
                CHECK(repo.pending()[i].id == expect[i]);
        }
    }
}
