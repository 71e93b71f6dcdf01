"""Exact slot-relaxation solver for tiny instances.

Slot profiles are enumerated as multisets of per-machine vectors within each
group of machines sharing a target interval. For every profile the remaining
question (can jobs be spread fractionally to match it?) is a linear
feasibility problem, decided exactly by a phase-one simplex over Fractions.

Pruning: two machines with the same interval whose slot vectors agree in
parity can be replaced by their average without losing feasibility, so a
search for *some* solution may skip every profile containing such a pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .instance import Instance, IntervalCatalog, JobClasses, interval_catalog
from .relaxation import FractionalAssignment, SlotProfile, check_slot_feasible

ZERO = Fraction(0)
ONE = Fraction(1)


class LimitsExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactLimits:
    n: int = 10
    m: int = 4
    q: int = 2
    K: int = 2

    def check(self, n: int, m: int, q: int, K: int) -> None:
        over = [f"{name}={v} > {cap}" for name, v, cap in
                (("n", n, self.n), ("m", m, self.m), ("q", q, self.q), ("K", K, self.K)) if v > cap]
        if over:
            raise LimitsExceeded("limits exceeded: " + ", ".join(over))

    def admits(self, n: int, m: int, q: int, K: int) -> bool:
        return n <= self.n and m <= self.m and q <= self.q and K <= self.K


Vector = tuple[int, ...]


@dataclass(frozen=True)
class TypeGuess:
    """For each interval type, the multiset of slot vectors as (vector, count) pairs."""

    groups: tuple[tuple[tuple[Vector, int], ...], ...]

    def vectors(self, r: int) -> list[Vector]:
        out: list[Vector] = []
        for vec, c in self.groups[r]:
            out.extend([vec] * c)
        return out

    def profile(self, catalog: IntervalCatalog) -> SlotProfile:
        """Slot vectors handed to the machines of each type in index order."""
        m = len(catalog.machine_type)
        rows: list[Vector | None] = [None] * m
        for r in range(catalog.K):
            for i, vec in zip(catalog.machines_of(r), self.vectors(r)):
                rows[i] = vec
        return tuple(rows)  # type: ignore[arg-type]


def _parity(v: Vector) -> Vector:
    return tuple(x & 1 for x in v)


def _vectors_upto(cap: Vector, below: Vector | None) -> Iterator[Vector]:
    """Vectors componentwise <= ``cap``, lexicographically <= ``below``, descending."""

    def rec(k: int, prefix: list[int], tight: bool) -> Iterator[Vector]:
        if k == len(cap):
            yield tuple(prefix)
            return
        top = cap[k]
        if tight and below is not None:
            top = min(top, below[k])
        for v in range(top, -1, -1):
            prefix.append(v)
            yield from rec(k + 1, prefix, tight and below is not None and v == below[k])
            prefix.pop()

    return rec(0, [], True)


def enumerate_type_guesses(
    classes: JobClasses,
    catalog: IntervalCatalog,
    limits: ExactLimits | None = None,
    *,
    prune: bool = True,
) -> Iterator[TypeGuess]:
    """Every slot profile up to permuting machines of equal interval.

    Within a type the vectors are produced in non-increasing lexicographic
    order, so each multiset appears once. With ``prune`` a multiset holding two
    different vectors of equal parity is skipped.
    """
    if limits is not None:
        limits.check(classes.n, len(catalog.machine_type), classes.q, catalog.K)
    need = tuple(classes.counts)
    q = classes.q

    def within_type(r: int, left: int, remaining: Vector, chosen: list[Vector],
                    parities: dict[Vector, Vector], done: list) -> Iterator[TypeGuess]:
        if left == 0:
            groups = done + [_group(chosen)]
            if r + 1 == catalog.K:
                if not any(remaining):
                    yield TypeGuess(tuple(groups))
                return
            yield from within_type(r + 1, catalog.counts[r + 1], remaining, [], {}, groups)
            return
        last_machine = r + 1 == catalog.K and left == 1
        below = chosen[-1] if chosen else None
        candidates = [remaining] if last_machine else _vectors_upto(remaining, below)
        for vec in candidates:
            if last_machine and below is not None and vec > below:
                continue
            par = _parity(vec)
            if prune and parities.get(par, vec) != vec:
                continue
            added = par not in parities
            if added:
                parities[par] = vec
            chosen.append(vec)
            yield from within_type(r, left - 1, tuple(a - b for a, b in zip(remaining, vec)), chosen, parities, done)
            chosen.pop()
            if added:
                del parities[par]

    if catalog.K == 0:
        return
    if len(need) != q:
        raise ValueError("class counts do not match q")
    yield from within_type(0, catalog.counts[0], need, [], {}, [])


def _group(vectors: list[Vector]) -> tuple[tuple[Vector, int], ...]:
    out: list[tuple[Vector, int]] = []
    for v in vectors:
        if out and out[-1][0] == v:
            out[-1] = (v, out[-1][1] + 1)
        else:
            out.append((v, 1))
    return tuple(out)


@dataclass
class LinearFeasibilityProblem:
    """``A_eq x = b_eq``, ``lo <= A_in x <= hi``, ``x >= 0`` with sparse rational rows."""

    num_vars: int
    equalities: list[tuple[dict[int, Fraction], Fraction]] = field(default_factory=list)
    inequalities: list[tuple[dict[int, Fraction], Fraction, Fraction]] = field(default_factory=list)

    def add_equality(self, coeffs: dict[int, Fraction], rhs: Fraction | int) -> None:
        self.equalities.append((coeffs, Fraction(rhs)))

    def add_range(self, coeffs: dict[int, Fraction], lo: Fraction | int, hi: Fraction | int) -> None:
        self.inequalities.append((coeffs, Fraction(lo), Fraction(hi)))

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        def dot(c: dict[int, Fraction]) -> Fraction:
            return sum((v * x[j] for j, v in c.items()), ZERO)

        return (all(v >= 0 for v in x)
                and all(dot(c) == b for c, b in self.equalities)
                and all(lo <= dot(c) <= hi for c, lo, hi in self.inequalities))


def lp_feasible(problem: LinearFeasibilityProblem) -> list[Fraction] | None:
    """A feasible point, or None. Phase-one simplex with Bland's rule."""
    nv = problem.num_vars
    rows: list[tuple[dict[int, Fraction], Fraction]] = list(problem.equalities)
    n_slack = 0
    for coeffs, lo, hi in problem.inequalities:
        if lo > hi:
            return None
        lo_row = dict(coeffs)
        lo_row[nv + n_slack] = -ONE
        rows.append((lo_row, lo))
        hi_row = dict(coeffs)
        hi_row[nv + n_slack + 1] = ONE
        rows.append((hi_row, hi))
        n_slack += 2
    n_struct = nv + n_slack
    R = len(rows)
    width = n_struct + R + 1  # structural, artificial, rhs
    tab: list[list[Fraction]] = []
    for r, (coeffs, rhs) in enumerate(rows):
        row = [ZERO] * width
        sign = -1 if rhs < 0 else 1
        for j, v in coeffs.items():
            row[j] = sign * Fraction(v)
        row[n_struct + r] = ONE
        row[-1] = sign * rhs
        tab.append(row)
    basis = [n_struct + r for r in range(R)]
    # reduced-cost row of the artificial sum: positive entries improve it
    cost = [sum((tab[r][j] for r in range(R)), ZERO) for j in range(n_struct)] + [ZERO] * R
    cost.append(sum((tab[r][-1] for r in range(R)), ZERO))

    while True:
        enter = next((j for j in range(n_struct) if cost[j] > 0), None)
        if enter is None:
            break
        leave = None
        best: tuple[Fraction, int] | None = None
        for r in range(R):
            a = tab[r][enter]
            if a > 0:
                key = (tab[r][-1] / a, basis[r])
                if best is None or key < best:
                    best, leave = key, r
        if leave is None:  # cannot happen: the phase-one objective is bounded below
            raise ArithmeticError("unbounded phase-one problem")
        prow = tab[leave]
        piv = prow[enter]
        if piv != 1:
            tab[leave] = prow = [v / piv for v in prow]
        nz = [j for j, v in enumerate(prow) if v != 0]
        for r in range(R):
            if r != leave:
                f = tab[r][enter]
                if f != 0:
                    row = tab[r]
                    for j in nz:
                        row[j] -= f * prow[j]
        f = cost[enter]
        for j in nz:
            cost[j] -= f * prow[j]
        basis[leave] = enter
    if cost[-1] != 0:
        return None
    x = [ZERO] * nv
    for r, b in enumerate(basis):
        if b < nv:
            x[b] = tab[r][-1]
    return x


def slot_lp(inst: Instance, classes: JobClasses, y: SlotProfile, delta: Fraction | int = 0) -> LinearFeasibilityProblem:
    """Coverage, slot-count and load constraints for a fixed profile; variable ``i*n + j``."""
    n, m = inst.n, inst.m
    slack = Fraction(delta) * inst.p_max
    prob = LinearFeasibilityProblem(m * n)
    for j in range(n):
        prob.add_equality({i * n + j: ONE for i in range(m)}, 1)
    for i in range(m):
        for k, members in enumerate(classes.classes):
            prob.add_equality({i * n + j: ONE for j in members}, y[i][k])
    for i, t in enumerate(inst.machines):
        prob.add_range({i * n + j: Fraction(p) for j, p in enumerate(inst.jobs)}, t.lower - slack, t.upper + slack)
    return prob


@dataclass
class ExactSolution:
    x: FractionalAssignment
    y: SlotProfile
    guess_index: int
    guesses_tried: int

    def __bool__(self) -> bool:
        return True


@dataclass
class ExactInfeasible:
    guesses_tried: int
    reason: str = "no slot profile admits a fractional assignment"

    def __bool__(self) -> bool:
        return False


def _load_range_ok(inst: Instance, classes: JobClasses, y: SlotProfile, slack: Fraction) -> bool:
    for i, t in enumerate(inst.machines):
        lo = sum(classes.prefix_sum(k, y[i][k]) for k in range(classes.q))
        hi = sum(classes.totals[k] - classes.prefix_sum(k, classes.counts[k] - y[i][k]) for k in range(classes.q))
        if hi < t.lower - slack or lo > t.upper + slack:
            return False
    return True


def solve_slot_milp_exact(
    inst: Instance,
    classes: JobClasses,
    limits: ExactLimits | None = None,
    *,
    delta: Fraction | int = 0,
    prune: bool = True,
) -> ExactSolution | ExactInfeasible:
    """First profile (in enumeration order) whose linear problem is feasible."""
    limits = limits or ExactLimits()
    catalog = interval_catalog(inst)
    limits.check(inst.n, inst.m, classes.q, catalog.K)
    slack = Fraction(delta) * inst.p_max
    tried = 0
    for idx, guess in enumerate(enumerate_type_guesses(classes, catalog, prune=prune)):
        y = guess.profile(catalog)
        if not _load_range_ok(inst, classes, y, slack):
            continue
        tried += 1
        point = lp_feasible(slot_lp(inst, classes, y, delta))
        if point is None:
            continue
        x = FractionalAssignment(inst.m, inst.n)
        for v, val in enumerate(point):
            if val:
                x[v // inst.n, v % inst.n] = val
        report = check_slot_feasible(inst, classes, x, y, delta)
        if not report.feasible:  # the simplex returned a bad point; never expected
            raise ArithmeticError(f"LP point fails the relaxation: {report.failures()}")
        return ExactSolution(x, y, idx, tried)
    return ExactInfeasible(tried)
