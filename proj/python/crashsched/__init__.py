"""Deterministic simulator and verification harness for crash/restart scheduling."""

from crashsched._core import (
    adversary,
    burst_min_speedup,
    dec_c_sched,
    dec_t_sched,
    fuzz,
    gamma,
    non_competitive,
    opt,
    reduce_partition,
    run_cli,
    simulate,
    solve_partition,
    subset_sum_partitionable,
    sufficient_speedup,
    validate_pattern,
    verify,
)

__all__ = [
    "adversary",
    "burst_min_speedup",
    "dec_c_sched",
    "dec_t_sched",
    "fuzz",
    "gamma",
    "non_competitive",
    "opt",
    "reduce_partition",
    "run_cli",
    "simulate",
    "solve_partition",
    "subset_sum_partitionable",
    "sufficient_speedup",
    "validate_pattern",
    "verify",
]
