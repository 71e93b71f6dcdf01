"""Slot relaxation: data model, feasibility checks, averaging, ordering conditions.

A slot profile ``y[i][k]`` says how many class-``k`` jobs machine ``i`` takes;
a fractional assignment ``x`` spreads each job over machines with unit mass.
The relaxation asks for integral ``y`` and fractional ``x`` such that every
machine load ``sum_j p_j x[i][j]`` lies in its target interval (optionally
widened by ``delta * p_max`` on both sides).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .instance import Instance, JobClasses

SlotProfile = tuple[tuple[int, ...], ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_profile(y: Iterable[Iterable[int]]) -> SlotProfile:
    return tuple(tuple(int(v) for v in row) for row in y)


class FractionalAssignment:
    """Sparse ``m x n`` matrix of rationals; absent entries are zero."""

    __slots__ = ("m", "n", "rows")

    def __init__(self, m: int, n: int, rows: Sequence[dict[int, Fraction]] | None = None):
        self.m = m
        self.n = n
        if rows is None:
            self.rows = [dict() for _ in range(m)]
        else:
            if len(rows) != m:
                raise ValueError(f"expected {m} rows, got {len(rows)}")
            self.rows = [{j: Fraction(v) for j, v in r.items() if v != 0} for r in rows]

    @classmethod
    def from_integral(cls, assignment: Sequence[int], m: int) -> FractionalAssignment:
        x = cls(m, len(assignment))
        for j, i in enumerate(assignment):
            x.rows[i][j] = ONE
        return x

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        return self.rows[i].get(j, ZERO)

    def __setitem__(self, key: tuple[int, int], value: Fraction) -> None:
        i, j = key
        if value == 0:
            self.rows[i].pop(j, None)
        else:
            self.rows[i][j] = Fraction(value)

    def add(self, i: int, j: int, delta: Fraction) -> None:
        self[i, j] = self[i, j] + delta

    def copy(self) -> FractionalAssignment:
        out = FractionalAssignment(self.m, self.n)
        out.rows = [dict(r) for r in self.rows]
        return out

    def column_sum(self, j: int) -> Fraction:
        return sum((r.get(j, ZERO) for r in self.rows), ZERO)

    def load(self, i: int, jobs: Sequence[int]) -> Fraction:
        return sum((v * jobs[j] for j, v in self.rows[i].items()), ZERO)

    def class_mass(self, i: int, members: Iterable[int]) -> Fraction:
        row = self.rows[i]
        return sum((row.get(j, ZERO) for j in members), ZERO)

    def class_volume(self, i: int, members: Iterable[int], jobs: Sequence[int]) -> Fraction:
        row = self.rows[i]
        return sum((row.get(j, ZERO) * jobs[j] for j in members), ZERO)

    def is_integral(self) -> bool:
        return all(v == 1 for r in self.rows for v in r.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FractionalAssignment):
            return NotImplemented
        return (self.m, self.n, self.rows) == (other.m, other.n, other.rows)

    def __repr__(self) -> str:
        return f"FractionalAssignment(m={self.m}, n={self.n}, nnz={sum(map(len, self.rows))})"


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    ok: bool
    worst: Fraction = ZERO
    where: str | None = None


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[ConstraintCheck, ...]

    @property
    def feasible(self) -> bool:
        return all(c.ok for c in self.checks)

    def __getitem__(self, name: str) -> ConstraintCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[ConstraintCheck]:
        return [c for c in self.checks if not c.ok]


class _Worst:
    def __init__(self, name: str):
        self.name = name
        self.value = ZERO
        self.where: str | None = None

    def see(self, violation: Fraction, where: str) -> None:
        if violation > self.value:
            self.value = violation
            self.where = where

    def result(self) -> ConstraintCheck:
        return ConstraintCheck(self.name, self.value == 0, self.value, self.where)


def _check_dims(inst: Instance, classes: JobClasses, x: FractionalAssignment | None, y: SlotProfile) -> None:
    if x is not None and (x.m != inst.m or x.n != inst.n):
        raise ValueError(f"dimension mismatch: x is {x.m}x{x.n}, instance is {inst.m}x{inst.n}")
    if len(y) != inst.m or any(len(row) != classes.q for row in y):
        raise ValueError(f"dimension mismatch: y must be {inst.m}x{classes.q}")


def check_slot_feasible(
    inst: Instance,
    classes: JobClasses,
    x: FractionalAssignment,
    y: SlotProfile,
    delta: Fraction | int = 0,
) -> FeasibilityReport:
    """Exact check of every relaxation constraint; ``delta`` widens the load bounds."""
    _check_dims(inst, classes, x, y)
    slack = Fraction(delta) * classes.p_max
    nonneg = _Worst("nonnegativity")
    coverage = _Worst("coverage")
    slots = _Worst("slots")
    lower = _Worst("lower")
    upper = _Worst("upper")

    for i, row in enumerate(x.rows):
        for j, v in row.items():
            if not 0 <= j < inst.n:
                raise ValueError(f"dimension mismatch: job index {j} out of range")
            nonneg.see(-v, f"x[{i},{j}]")
    for j in range(inst.n):
        coverage.see(abs(x.column_sum(j) - 1), f"job {j}")
    for i in range(inst.m):
        for k, members in enumerate(classes.classes):
            slots.see(abs(x.class_mass(i, members) - y[i][k]), f"machine {i}, class {k}")
        load = x.load(i, inst.jobs)
        t = inst.machines[i]
        lower.see(t.lower - slack - load, f"machine {i}")
        upper.see(load - t.upper - slack, f"machine {i}")
    return FeasibilityReport(tuple(w.result() for w in (nonneg, coverage, slots, lower, upper)))


@dataclass(frozen=True)
class AverageSizeVector:
    """Per-machine, per-class average job size; undefined where ``y == 0``."""

    z: tuple[tuple[Fraction, ...], ...]
    defined: tuple[tuple[bool, ...], ...]

    def __getitem__(self, key: tuple[int, int]) -> Fraction | None:
        i, k = key
        return self.z[i][k] if self.defined[i][k] else None


def average_sizes(classes: JobClasses, x: FractionalAssignment, y: SlotProfile) -> AverageSizeVector:
    z_rows = []
    d_rows = []
    for i in range(x.m):
        zr = []
        dr = []
        for k, members in enumerate(classes.classes):
            mass = x.class_mass(i, members)
            if mass != y[i][k]:
                raise ValueError(f"slot count mismatch at machine {i}, class {k}: mass {mass} != y {y[i][k]}")
            if y[i][k] > 0:
                zr.append(x.class_volume(i, members, classes.jobs) / y[i][k])
                dr.append(True)
            else:
                zr.append(ZERO)
                dr.append(False)
        z_rows.append(tuple(zr))
        d_rows.append(tuple(dr))
    return AverageSizeVector(tuple(z_rows), tuple(d_rows))


def average_pair(
    inst: Instance, x: FractionalAssignment, y: SlotProfile, i1: int, i2: int
) -> tuple[FractionalAssignment, SlotProfile]:
    """Replace machines ``i1`` and ``i2`` by their average.

    Both machines must share a target interval and have slot vectors of equal
    parity, so that the averaged slot counts stay integral.
    """
    if i1 == i2:
        raise ValueError("average_pair needs two distinct machines")
    if inst.machines[i1] != inst.machines[i2]:
        raise ValueError(f"machines {i1} and {i2} have different target intervals")
    a, b = y[i1], y[i2]
    bad = [k for k, (u, v) in enumerate(zip(a, b)) if (u - v) % 2]
    if bad:
        raise ValueError(f"parity mismatch between machines {i1} and {i2} in classes {bad}")
    out = x.copy()
    half = Fraction(1, 2)
    merged = {j: (x[i1, j] + x[i2, j]) * half for j in set(x.rows[i1]) | set(x.rows[i2])}
    out.rows[i1] = dict(merged)
    out.rows[i2] = dict(merged)
    avg = tuple((u + v) // 2 for u, v in zip(a, b))
    y_new = tuple(avg if i in (i1, i2) else row for i, row in enumerate(y))
    return out, y_new


def squared_norm_potential(y: SlotProfile) -> int:
    """``sum_i ||y_i||^2``; strictly decreases when two distinct rows are averaged."""
    return sum(v * v for row in y for v in row)


def norm_sum_not_increased(a: Sequence[int], b: Sequence[int]) -> tuple[bool, bool]:
    """Compare ``||a|| + ||b||`` against ``2 * ||(a + b) / 2|| = ||a + b||`` exactly.

    Returns ``(non_increasing, strictly_decreasing)``. The comparison reduces to
    Cauchy-Schwarz on ``a . b`` versus ``||a|| ||b||`` so no square roots are taken.
    """
    dot = sum(u * v for u, v in zip(a, b))
    na = sum(u * u for u in a)
    nb = sum(v * v for v in b)
    # ||a+b||^2 <= (||a||+||b||)^2  <=>  a.b <= ||a|| ||b||
    if dot < 0:
        return True, True
    lhs, rhs = dot * dot, na * nb
    return lhs <= rhs, lhs < rhs


@dataclass
class OrderingReport:
    """Failures of the ordering conditions, one list per condition."""

    min_jobs_bound: list[str] = field(default_factory=list)
    total_volume: list[str] = field(default_factory=list)
    monotonicity: list[str] = field(default_factory=list)
    bounds: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.min_jobs_bound or self.total_volume or self.monotonicity or self.bounds)

    def failures(self) -> list[str]:
        return self.min_jobs_bound + self.total_volume + self.monotonicity + self.bounds


def check_ordering_conditions(
    inst: Instance,
    classes: JobClasses,
    order: Sequence[int],
    y: SlotProfile,
    z: Sequence[Sequence[Fraction]],
    delta: Fraction | int,
) -> OrderingReport:
    """Verify prefix, class-total, monotonicity and per-machine load conditions.

    ``order[t]`` is the machine in position ``t``. Entries with ``y == 0`` carry
    no volume and are skipped in the monotonicity chain.
    """
    _check_dims(inst, classes, None, y)
    if sorted(order) != list(range(inst.m)):
        raise ValueError("order must be a permutation of the machines")
    delta = Fraction(delta)
    rep = OrderingReport()
    p_max = classes.p_max
    class_slack = delta * p_max / classes.q

    for k in range(classes.q):
        volume = ZERO
        count = 0
        last: Fraction | None = None
        for t, i in enumerate(order):
            yk = y[i][k]
            if yk > 0:
                zk = Fraction(z[i][k])
                volume += yk * zk
                count += yk
                if last is not None and zk < last:
                    rep.monotonicity.append(f"class {k}, position {t}: z={zk} < previous {last}")
                last = zk
            if count > len(classes.classes[k]):
                rep.min_jobs_bound.append(f"class {k}, position {t}: {count} slots exceed class size")
                break
            need = classes.prefix_sum(k, count)
            if volume < need:
                rep.min_jobs_bound.append(f"class {k}, position {t}: prefix volume {volume} < {need}")
        total = classes.totals[k]
        if count != len(classes.classes[k]):
            rep.total_volume.append(f"class {k}: {count} slots for {len(classes.classes[k])} jobs")
        if not total <= volume <= total + class_slack:
            rep.total_volume.append(f"class {k}: volume {volume} outside [{total}, {total + class_slack}]")

    for i in range(inst.m):
        load = sum((y[i][k] * Fraction(z[i][k]) for k in range(classes.q) if y[i][k]), ZERO)
        t = inst.machines[i]
        if not t.lower <= load <= t.upper + delta * p_max:
            rep.bounds.append(f"machine {i}: load {load} outside [{t.lower}, {t.upper + delta * p_max}]")
    return rep
