import json

import pytest

import crashsched as cs


def small_pattern(speedup="2", beta=2):
    return json.dumps(
        {
            "params": {"n": 1, "speedup": speedup, "lmin": 1, "lmax": 2, "beta": beta},
            "events": [
                {"t": "0", "kind": "inject", "task": {"id": 1, "cost": 2}},
                {"t": "0", "kind": "inject", "task": {"id": 2, "cost": 1}},
                {"t": "1", "kind": "crash", "proc": 1},
                {"t": "2", "kind": "restart", "proc": 1},
            ],
        }
    )


def test_gamma():
    assert cs.gamma(1, 2, "6/5") == 4
    assert cs.gamma(2, 5, "5/4") == 5
    assert cs.gamma(1, 2, "2") == 0
    with pytest.raises(ValueError):
        cs.gamma(1, 2, "1")
    with pytest.raises(ValueError):
        cs.gamma(0, 2, "3/2")


def test_thresholds():
    assert cs.non_competitive(1, 2, "6/5")
    assert not cs.non_competitive(1, 2, "3/2")

    golden = cs.sufficient_speedup(1, 2)
    assert golden["speedup"] == "1 + 1*sqrt(1/2)"
    assert not golden["is_rational"]
    assert golden["non_competitive_below"] == "3/2"
    assert cs.sufficient_speedup(13, 21)["is_rational"]  # ratio below the golden ratio

    assert cs.burst_min_speedup(1, 2) == "3/2"
    assert cs.burst_min_speedup(2, 3) is None


def test_validate_pattern():
    assert cs.validate_pattern(small_pattern()) == []
    broken = json.loads(small_pattern())
    broken["events"][0]["task"]["cost"] = 9
    problems = cs.validate_pattern(json.dumps(broken))
    assert problems and "cost" in problems[0]


def test_simulate():
    result = cs.simulate(small_pattern(), "lis", horizon="6")
    assert result["final_pending_tasks"] == 0
    assert result["final_pending_cost"] == 0
    assert result["trace_csv"].startswith("time,event,proc,task,pending_tasks,pending_cost\n")

    with pytest.raises(ValueError):
        cs.simulate(small_pattern(), "fifo", horizon="6")


def test_partition_and_opt():
    encoded = cs.reduce_partition([1, 2, 3])
    assert encoded["checkpoint"] == "7"
    assert encoded["omega"] == 0

    answer = cs.opt(encoded["pattern_json"], encoded["checkpoint"])
    assert answer == {"min_pending_cost": 0, "min_pending_tasks": 0}
    assert cs.dec_c_sched(encoded["pattern_json"], encoded["checkpoint"], 0)

    assert cs.solve_partition([1, 2, 3])
    assert not cs.solve_partition([2, 3, 3])
    for values in ([1, 2, 3], [2, 3, 3], [2, 3, 5], [4, 4]):
        assert cs.solve_partition(values) == cs.subset_sum_partitionable(values)


def test_adversary():
    run = cs.adversary("lis", 1, 2, "6/5", 4, 2)
    assert run["gamma"] == 4
    assert run["problems"] == []
    assert run["phase_log_csv"].startswith("phase,scenario,kappa,alg_pending,off_pending\n")

    with pytest.raises(ValueError):
        cs.adversary("lis", 1, 2, "2", 4, 2)  # competitive speedup


def test_verify():
    result = cs.verify(small_pattern(), "lis")
    assert result["holds"]
    assert result["incidents"] == 0
    assert len(result["reports"]) == 2
    assert all(json.loads(r)["holds"] for r in result["reports"])


def test_fuzz():
    result = cs.fuzz("lis", trials=20, seed=1)
    assert result == {"trials": 20, "incidents": 0, "ok": True}
    with pytest.raises(RuntimeError):
        cs.fuzz("lis", n=3, trials=1)


def test_run_cli():
    assert cs.run_cli(["reduce-partition", "--set", "1,2,3", "--solve"]) == (0, "TRUE\n", "")
    code, _, err = cs.run_cli(["reduce-partition", "--set", "1,2,x", "--solve"])
    assert code == 2 and err
    assert cs.run_cli(["fuzz", "--scheduler", "lis", "--trials", "3", "--seed", "5"])[0] == 0
