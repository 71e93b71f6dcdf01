"""Seeded random instances.

``target`` style intervals are built around the loads of a hidden random
assignment, so the instance is feasible; each of the ``k`` distinct intervals
is widened to cover every machine that uses it. The objective styles give
every machine ``[0, total]`` since those solvers only read the jobs.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .instance import Instance, InstanceError, TargetInterval

STYLES = ("target", "makespan", "santa", "envy")


def _check(n: int, m: int, pmax: int) -> None:
    if n < 1:
        raise InstanceError("n must be at least 1")
    if m < 1:
        raise InstanceError("m must be at least 1")
    if pmax < 1:
        raise InstanceError("pmax must be at least 1")


def planted_balance_jobs(n: int, m: int, pmax: int, rng: random.Random) -> list[int]:
    """``n`` jobs in ``[1, pmax]`` that split into ``m`` groups of equal sum.

    Group sizes differ by at most one. The common sum is drawn from the range
    every group can reach, then each group starts at all ones and gains random
    unit increments until it hits the sum.
    """
    _check(n, m, pmax)
    if n < m:
        raise InstanceError(f"planted balance needs n >= m, got n={n}, m={m}")
    sizes = [n // m + (g < n % m) for g in range(m)]
    lo, hi = max(sizes), min(sizes) * pmax
    if lo > hi:
        raise InstanceError(f"no common group sum exists for n={n}, m={m}, pmax={pmax}")
    target = rng.randint(lo, hi)
    jobs: list[int] = []
    for s in sizes:
        group = [1] * s
        for _ in range(target - s):
            room = [t for t in range(s) if group[t] < pmax]
            group[rng.choice(room)] += 1
        jobs.extend(group)
    rng.shuffle(jobs)
    return jobs


def generate_instance(
    n: int,
    m: int,
    pmax: int,
    *,
    k_intervals: int = 1,
    style: str = "target",
    seed: int = 0,
    planted_balance: bool = False,
) -> Instance:
    _check(n, m, pmax)
    if style not in STYLES:
        raise InstanceError(f"unknown objective style {style!r}")
    if not 1 <= k_intervals <= m:
        raise InstanceError(f"k-intervals must lie in [1, m], got {k_intervals}")
    rng = random.Random(seed)
    if planted_balance:
        jobs = planted_balance_jobs(n, m, pmax, rng)
    else:
        jobs = [rng.randint(1, pmax) for _ in range(n)]
    total = sum(jobs)
    if style != "target":
        return Instance.uniform(jobs, m, 0, total)

    loads = [0] * m
    for p in jobs:
        loads[rng.randrange(m)] += p
    # every interval type is used by at least one machine
    types = list(range(k_intervals)) + [rng.randrange(k_intervals) for _ in range(m - k_intervals)]
    rng.shuffle(types)
    bounds: dict[int, tuple[int, int]] = {}
    for i, r in enumerate(types):
        lo, hi = bounds.get(r, (loads[i], loads[i]))
        bounds[r] = (min(lo, loads[i]), max(hi, loads[i]))
    intervals = {}
    for r, (lo, hi) in bounds.items():
        pad_lo = rng.randint(0, pmax // 2)
        pad_hi = rng.randint(0, pmax // 2)
        intervals[r] = TargetInterval(Fraction(max(0, lo - pad_lo)), Fraction(hi + pad_hi))
    return Instance(tuple(jobs), tuple(intervals[r] for r in types))
