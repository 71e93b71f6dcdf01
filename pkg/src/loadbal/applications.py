"""Target-feasibility pipeline and the three objectives built on it.

Makespan, max-min load ("santa") and envy on identical machines are solved by
guessing target intervals on a grid of spacing ``p_max / q`` and asking the
target pipeline whether each guess is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

from .dp import Infeasible, solve_slot_milp_dp
from .exact import ExactLimits, solve_slot_milp_exact
from .fractional import build_fractional
from .instance import Instance, Objective, classify_jobs, interval_catalog, objective_value, parse_rational
from .local_search import SwapRecord, round_solution

CALIBRATION_FACTOR = {Objective.TARGET: 1, Objective.MAKESPAN: 3, Objective.SANTA: 3, Objective.ENVY: 6}


@dataclass(frozen=True)
class Calibration:
    """Internal class count ``q`` and relaxation slack ``delta`` for a user epsilon.

    ``bound_factor * p_max`` is the additive error the whole scheme guarantees.
    """

    user_eps: Fraction
    objective: Objective
    q: int
    delta: Fraction

    @property
    def grid_factor(self) -> Fraction:
        return Fraction(1, self.q)

    @property
    def bound_factor(self) -> Fraction:
        eps, g, d = Fraction(1, self.q), self.grid_factor, self.delta
        if self.objective is Objective.TARGET:
            return eps + d
        if self.objective is Objective.ENVY:
            return 2 * g + 2 * (d + eps)
        return g + d + eps

    def as_dict(self) -> dict[str, str | int]:
        return {
            "user_eps": str(self.user_eps),
            "q": self.q,
            "delta": str(self.delta),
            "bound_factor": str(self.bound_factor),
        }


def calibrate(user_eps: Fraction | int | str, objective: Objective | str, delta: Fraction | None = None) -> Calibration:
    """``q = ceil(c / eps)`` with ``c`` = 3 (makespan, santa), 6 (envy), 1 (target); ``delta = 1/q``.

    For raw target feasibility ``delta`` is taken as given (it widens the
    intervals the caller asked for, so it is the caller's choice).
    """
    eps = parse_rational(user_eps, "eps")
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    objective = Objective(objective)
    q = ceil(CALIBRATION_FACTOR[objective] / eps)
    if objective is Objective.TARGET:
        d = Fraction(0) if delta is None else Fraction(delta)
    else:
        d = Fraction(1, q) if delta is None else Fraction(delta)
    if d < 0:
        raise ValueError("delta must be non-negative")
    return Calibration(eps, objective, q, d)


@dataclass
class TargetSolution:
    assignment: list[int]
    loads: list[int]
    path: str
    q: int
    delta: Fraction
    stats: dict[str, int] = field(default_factory=dict)
    records: list[SwapRecord] = field(default_factory=list)
    profile: tuple[tuple[int, ...], ...] = ()

    def __bool__(self) -> bool:
        return True


@dataclass
class TargetInfeasible:
    path: str
    reason: str
    stats: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


def solve_target(
    inst: Instance,
    q: int,
    delta: Fraction | int | None = None,
    *,
    path: str = "auto",
    limits: ExactLimits | None = None,
    max_states: int | None = None,
    instrument: bool = False,
) -> TargetSolution | TargetInfeasible:
    """Assignment with loads in ``[l - (eps+delta)p_max, u + (eps+delta)p_max]``, or a verdict.

    ``path`` is "exact", "dp" or "auto" (exact when the instance fits its
    limits). The exact path solves the relaxation without slack, so its band
    is ``eps * p_max`` only. ``delta`` defaults to ``1/n`` on the DP path.
    An infeasible verdict from either path means the instance itself has no
    assignment within its intervals.
    """
    classes = classify_jobs(inst, q)
    limits = limits or ExactLimits()
    if path == "auto":
        K = interval_catalog(inst).K
        path = "exact" if limits.admits(inst.n, inst.m, q, K) else "dp"
    stats: dict[str, int] = {}
    if path == "exact":
        res = solve_slot_milp_exact(inst, classes, limits)
        stats["lp_solves"] = getattr(res, "guesses_tried", 0)
        if not res:
            return TargetInfeasible(path, res.reason, stats)
        x, y, used_delta = res.x, res.y, Fraction(0)
    elif path == "dp":
        used_delta = Fraction(1, inst.n) if delta is None else Fraction(delta)
        sol = solve_slot_milp_dp(inst, classes, used_delta, max_states=max_states)
        if isinstance(sol, Infeasible):
            return TargetInfeasible(path, sol.reason, dict(sol.stats))
        stats.update(sol.stats)
        x, trace = build_fractional(inst, classes, sol.order, sol.y, sol.z, used_delta)
        stats["repair_swaps"] = trace.count()
        y = sol.y
    else:
        raise ValueError(f"unknown solver path {path!r}")
    rounding = round_solution(inst, classes, x, y, used_delta, instrument=instrument)
    stats["swaps_stage1"] = rounding.swaps[1]
    stats["swaps_stage2"] = rounding.swaps[2]
    return TargetSolution(
        rounding.machine_of, list(rounding.assignment.loads), path, q, used_delta, stats, rounding.records,
        tuple(tuple(row) for row in y),
    )


@dataclass
class ObjectiveResult:
    objective: Objective
    assignment: list[int]
    loads: list[int]
    value: Fraction
    certified_bound: Fraction
    grid_point: tuple[Fraction, Fraction]
    calibration: Calibration
    path: str
    stats: dict[str, int]
    grid_points_tried: int
    records: list[SwapRecord] = field(default_factory=list)
    profile: tuple[tuple[int, ...], ...] = ()

    def meta(self) -> dict:
        return {
            "objective": self.objective.value,
            "calibration": self.calibration.as_dict(),
            "grid_point": [str(self.grid_point[0]), str(self.grid_point[1])],
            "path": self.path,
            "grid_points_tried": self.grid_points_tried,
            "stats": dict(sorted(self.stats.items())),
        }


def _grid_indices(lo: Fraction, hi: Fraction, g: Fraction) -> range:
    return range(floor(lo / g), ceil(hi / g) + 1)


def _scan(
    objective: Objective,
    jobs: Sequence[int],
    m: int,
    cal: Calibration,
    points: Iterable[tuple[Fraction, Fraction]],
    *,
    path: str = "dp",
    check_rest: bool = False,
    **kw,
) -> ObjectiveResult:
    """First feasible grid point in ``points``; DP work is summed over every attempt.

    With ``check_rest`` the scan goes on past the winner and asserts that every
    later point is feasible too (monotone grids only).
    """
    if not jobs:
        raise ValueError("at least one job is required")
    if m < 1:
        raise ValueError("need at least one machine")
    tried = 0
    states = 0
    found: ObjectiveResult | None = None
    for lo, hi in points:
        sol = solve_target(Instance.uniform(jobs, m, lo, hi), cal.q, cal.delta, path=path, **kw)
        states += sol.stats.get("states", 0)
        if found is not None:
            if not sol:
                raise AssertionError(f"grid not monotone: [{lo}, {hi}] infeasible after a feasible point")
            continue
        tried += 1
        if sol:
            stats = dict(sol.stats)
            found = ObjectiveResult(
                objective, sol.assignment, sol.loads, objective_value(sol.loads, objective),
                cal.bound_factor * max(jobs), (lo, hi), cal, sol.path, stats, tried, sol.records, sol.profile,
            )
            if not check_rest:
                break
    if found is None:
        raise AssertionError(f"no {objective.value} grid point was feasible; the scan range is wrong")
    found.stats["states_total"] = states
    return found


def solve_makespan(jobs: Sequence[int], m: int, user_eps, **kw) -> ObjectiveResult:
    """Makespan at most OPT + eps * p_max: smallest feasible upper bound on the grid.

    The scan covers ``[total/m, total/m + p_max]``, which contains list
    scheduling's makespan, so some point is always feasible.
    """
    cal = calibrate(user_eps, Objective.MAKESPAN)
    g = Fraction(max(jobs), cal.q)
    avg = Fraction(sum(jobs), m)
    points = ((Fraction(0), t * g) for t in _grid_indices(avg, avg + max(jobs), g))
    return _scan(Objective.MAKESPAN, jobs, m, cal, points, **kw)


def solve_santa(jobs: Sequence[int], m: int, user_eps, **kw) -> ObjectiveResult:
    """Minimum load at least OPT - eps * p_max: largest feasible lower bound on the grid."""
    cal = calibrate(user_eps, Objective.SANTA)
    total = sum(jobs)
    g = Fraction(max(jobs), cal.q)
    avg = Fraction(total, m)
    indices = sorted({t for t in _grid_indices(avg - max(jobs), avg, g) if t >= 0} | {0}, reverse=True)
    points = ((t * g, Fraction(total)) for t in indices)
    return _scan(Objective.SANTA, jobs, m, cal, points, **kw)


def envy_grid(total: int, m: int, g: Fraction) -> list[tuple[int, int]]:
    """Grid pairs ``(a, b)`` with ``a*g <= total/m <= b*g``, by width then by ``b``.

    Any assignment has min load <= total/m <= max load, so rounding its loads
    outward lands on one of these pairs.
    """
    avg = Fraction(total, m)
    a_max = floor(avg / g)
    b_min = ceil(avg / g)
    b_max = ceil(Fraction(total) / g)
    pairs = [(a, b) for a in range(0, a_max + 1) for b in range(max(a, b_min), b_max + 1)]
    pairs.sort(key=lambda ab: (ab[1] - ab[0], ab[1]))
    return pairs


def solve_envy(jobs: Sequence[int], m: int, user_eps, **kw) -> ObjectiveResult:
    """Envy (max load - min load) at most OPT + eps * p_max: narrowest feasible interval."""
    cal = calibrate(user_eps, Objective.ENVY)
    g = Fraction(max(jobs), cal.q)
    points = ((a * g, b * g) for a, b in envy_grid(sum(jobs), m, g))
    return _scan(Objective.ENVY, jobs, m, cal, points, **kw)


SOLVERS = {Objective.MAKESPAN: solve_makespan, Objective.SANTA: solve_santa, Objective.ENVY: solve_envy}


def greedy_list_schedule(jobs: Sequence[int], m: int) -> tuple[list[int], list[int]]:
    """Each job, in input order, goes to a least-loaded machine (lowest index on ties)."""
    if m < 1:
        raise ValueError("need at least one machine")
    loads = [0] * m
    assignment = []
    for p in jobs:
        i = min(range(m), key=lambda i: (loads[i], i))
        loads[i] += p
        assignment.append(i)
    return assignment, loads
