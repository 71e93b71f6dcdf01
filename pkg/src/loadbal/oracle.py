"""Exhaustive ground truth for tiny instances.

Both searches place jobs in decreasing size and treat machines with the same
target interval and the same current load as interchangeable.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .instance import Instance, Objective, objective_value

ORACLE_LIMIT = 14


class OracleLimitExceeded(ValueError):
    pass


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise OracleLimitExceeded(f"oracle handles at most {limit} jobs, got {n}")


def brute_force_target(inst: Instance, limit: int = ORACLE_LIMIT) -> list[int] | None:
    """An assignment meeting every target interval exactly, or None if none exists."""
    _check_limit(inst.n, limit)
    order = sorted(range(inst.n), key=lambda j: (-inst.jobs[j], j))
    sizes = [inst.jobs[j] for j in order]
    suffix = [0] * (inst.n + 1)
    for t in range(inst.n - 1, -1, -1):
        suffix[t] = suffix[t + 1] + sizes[t]
    lowers = [t.lower for t in inst.machines]
    uppers = [t.upper for t in inst.machines]
    m = inst.m
    loads = [0] * m
    choice = [0] * inst.n
    dead: set[tuple[int, tuple]] = set()

    def key(t: int) -> tuple[int, tuple]:
        return t, tuple(sorted(zip(inst.machines, loads)))

    def search(t: int) -> bool:
        if t == inst.n:
            return all(lowers[i] <= loads[i] for i in range(m))
        missing = sum(max(Fraction(0), lowers[i] - loads[i]) for i in range(m))
        if missing > suffix[t]:
            return False
        k = key(t)
        if k in dead:
            return False
        p = sizes[t]
        tried = set()
        for i in range(m):
            sig = (inst.machines[i], loads[i])
            if sig in tried or loads[i] + p > uppers[i]:
                continue
            tried.add(sig)
            loads[i] += p
            choice[t] = i
            if search(t + 1):
                return True
            loads[i] -= p
        dead.add(k)
        return False

    if not search(0):
        return None
    assignment = [0] * inst.n
    for t, j in enumerate(order):
        assignment[j] = choice[t]
    return assignment


def _final_load_multisets(jobs: Sequence[int], m: int) -> set[tuple[int, ...]]:
    level = {(0,) * m}
    for p in sorted(jobs, reverse=True):
        nxt = set()
        for loads in level:
            seen = set()
            for i, load in enumerate(loads):
                if load in seen:
                    continue
                seen.add(load)
                new = list(loads)
                new[i] += p
                nxt.add(tuple(sorted(new)))
        level = nxt
    return level


def brute_force_opt(jobs: Sequence[int], m: int, objective: Objective | str, limit: int = ORACLE_LIMIT) -> Fraction:
    """Exact optimum of makespan (min), santa (max of min load) or envy (min)."""
    _check_limit(len(jobs), limit)
    objective = Objective(objective)
    if objective is Objective.TARGET:
        raise ValueError("target feasibility has no optimum; use brute_force_target")
    finals = _final_load_multisets(jobs, m)
    values = [objective_value(loads, objective) for loads in finals]
    return max(values) if objective is Objective.SANTA else min(values)


def brute_force_opt_unpruned(jobs: Sequence[int], m: int, objective: Objective | str) -> Fraction:
    """Plain enumeration of all ``m ** n`` assignments; for cross-checking only."""
    from itertools import product

    objective = Objective(objective)
    best = None
    for assignment in product(range(m), repeat=len(jobs)):
        loads = [0] * m
        for j, i in enumerate(assignment):
            loads[i] += jobs[j]
        v = objective_value(loads, objective)
        if best is None or (v > best if objective is Objective.SANTA else v < best):
            best = v
    return best
