"""Round a slot solution to an integral assignment by same-class job swaps.

Every machine owns ``y[i][k]`` slots for class ``k``; each slot holds one job
of that class and swaps only exchange the jobs in two slots, so slot counts
never change. Stage one drains machines above ``u' + eps*p_max``; stage two
then lifts machines below ``l' - eps*p_max``, where ``l' = l - delta*p_max``
and ``u' = u + delta*p_max``.

Each swap is found by a breadth-first search over the slot graph: a source
points at all slots of violating machines, slots of one machine are joined by
free edges, and a unit edge runs between same-class slots of different
machines from the larger job to the smaller one (stage one) or the other way
round (stage two). The first edge that reaches a machine with room triggers
the swap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .instance import Instance, JobClasses
from .relaxation import FractionalAssignment, SlotProfile, check_slot_feasible

Slot = tuple[int, int, int]  # (machine, class, index)


class LocalSearchError(RuntimeError):
    """No swap exists although a machine is still out of band, or the swap bound was hit."""


class SlotAssignment:
    """Jobs placed in per-machine, per-class slots, with cached integer loads."""

    def __init__(self, jobs: Sequence[int], classes: JobClasses, slots: list[list[list[int]]]):
        self.jobs = tuple(jobs)
        self.classes = classes
        self.slots = slots
        self.where: dict[int, Slot] = {}
        for i, per_class in enumerate(slots):
            for k, cell in enumerate(per_class):
                for s, j in enumerate(cell):
                    self.where[j] = (i, k, s)
        self.loads = [sum(self.jobs[j] for cell in per_class for j in cell) for per_class in slots]

    @property
    def m(self) -> int:
        return len(self.slots)

    def slot_order(self) -> list[Slot]:
        return [(i, k, s) for i, per_class in enumerate(self.slots)
                for k, cell in enumerate(per_class) for s in range(len(cell))]

    def job_at(self, slot: Slot) -> int:
        i, k, s = slot
        return self.slots[i][k][s]

    def profile(self) -> SlotProfile:
        return tuple(tuple(len(cell) for cell in per_class) for per_class in self.slots)

    def swap(self, u: Slot, v: Slot) -> None:
        ju, jv = self.job_at(u), self.job_at(v)
        (iu, ku, su), (iv, kv, sv) = u, v
        if ku != kv:
            raise ValueError("swaps must stay within one class")
        self.slots[iu][ku][su] = jv
        self.slots[iv][kv][sv] = ju
        self.where[ju] = v
        self.where[jv] = u
        diff = self.jobs[ju] - self.jobs[jv]
        self.loads[iu] -= diff
        self.loads[iv] += diff

    def assignment(self) -> list[int]:
        out = [0] * len(self.jobs)
        for j, (i, _, _) in self.where.items():
            out[j] = i
        return out

    def copy(self) -> SlotAssignment:
        return SlotAssignment(self.jobs, self.classes, [[list(c) for c in pc] for pc in self.slots])


def loads(assignment: SlotAssignment) -> list[Fraction]:
    """Recomputed (not cached) machine loads."""
    return [Fraction(sum(assignment.jobs[j] for cell in per_class for j in cell)) for per_class in assignment.slots]


def initial_integral(classes: JobClasses, y: SlotProfile) -> SlotAssignment:
    """Fill slots class by class: smallest jobs first, machines in index order."""
    m = len(y)
    slots: list[list[list[int]]] = [[[] for _ in range(classes.q)] for _ in range(m)]
    for k, members in enumerate(classes.classes):
        need = sum(row[k] for row in y)
        if need != len(members):
            raise ValueError(f"class {k}: {need} slots for {len(members)} jobs")
        it = iter(members)
        for i in range(m):
            for _ in range(y[i][k]):
                slots[i][k].append(next(it))
    return SlotAssignment(classes.jobs, classes, slots)


@dataclass(frozen=True)
class Bounds:
    """Effective interval ``[lower, upper]`` per machine and the rounding band."""

    lower: tuple[Fraction, ...]
    upper: tuple[Fraction, ...]
    band: Fraction

    @classmethod
    def effective(cls, inst: Instance, q: int, delta: Fraction | int = 0) -> Bounds:
        slack = Fraction(delta) * inst.p_max
        return cls(
            tuple(t.lower - slack for t in inst.machines),
            tuple(t.upper + slack for t in inst.machines),
            Fraction(inst.p_max, q),
        )

    def over(self, i: int, load: Fraction | int) -> bool:
        return load > self.upper[i] + self.band

    def under(self, i: int, load: Fraction | int) -> bool:
        return load < self.lower[i] - self.band


@dataclass
class SlotGraph:
    stage: int
    slots: list[Slot]
    source: list[Slot]
    unit_edges: dict[Slot, list[Slot]]
    by_machine: dict[int, list[Slot]]

    def zero_edges(self, u: Slot) -> Iterator[Slot]:
        for v in self.by_machine[u[0]]:
            if v != u:
                yield v


def build_slot_graph(assignment: SlotAssignment, stage: int, bounds: Bounds) -> SlotGraph:
    if stage not in (1, 2):
        raise ValueError("stage must be 1 or 2")
    order = assignment.slot_order()
    jobs = assignment.jobs
    by_machine: dict[int, list[Slot]] = {i: [] for i in range(assignment.m)}
    by_class: dict[int, list[Slot]] = {}
    for sl in order:
        by_machine[sl[0]].append(sl)
        by_class.setdefault(sl[1], []).append(sl)
    violating = bounds.over if stage == 1 else bounds.under
    source = [sl for sl in order if violating(sl[0], assignment.loads[sl[0]])]
    unit: dict[Slot, list[Slot]] = {}
    for u in order:
        pu = jobs[assignment.job_at(u)]
        out = []
        for v in by_class[u[1]]:
            if v[0] == u[0]:
                continue
            pv = jobs[assignment.job_at(v)]
            if (pu > pv) if stage == 1 else (pu < pv):
                out.append(v)
        unit[u] = out
    return SlotGraph(stage, order, source, unit, by_machine)


def slot_distances(graph: SlotGraph, unreachable: int) -> dict[Slot, int]:
    """0-1 BFS distances from the source; unreachable slots get ``unreachable``."""
    dist: dict[Slot, int] = {}
    dq: deque[tuple[int, Slot]] = deque((0, sl) for sl in graph.source)
    while dq:
        d, u = dq.popleft()
        if u in dist:
            continue
        dist[u] = d
        for v in graph.zero_edges(u):
            if v not in dist:
                dq.appendleft((d, v))
        for v in graph.unit_edges[u]:
            if v not in dist:
                dq.append((d + 1, v))
    return {sl: dist.get(sl, unreachable) for sl in graph.slots}


def find_swap_bfs(graph: SlotGraph, assignment: SlotAssignment, bounds: Bounds) -> tuple[Slot, Slot] | None:
    """First unit edge, in BFS order, that reaches a machine with room.

    Stage one: room means load at most the effective upper bound; stage two:
    load at least the effective lower bound. Returns None iff nothing is reached,
    which can only be correct when no machine is violating.
    """
    if not graph.source:
        return None
    seen = {sl[0] for sl in graph.source}
    frontier = sorted(graph.source)
    while frontier:
        nxt_machines: list[int] = []
        for u in frontier:
            for v in graph.unit_edges[u]:
                iv = v[0]
                if iv in seen:
                    continue
                load = assignment.loads[iv]
                room = load <= bounds.upper[iv] if graph.stage == 1 else load >= bounds.lower[iv]
                if room:
                    return u, v
                seen.add(iv)
                nxt_machines.append(iv)
        frontier = sorted(sl for i in nxt_machines for sl in graph.by_machine[i])
    return None


@dataclass(frozen=True)
class SwapRecord:
    stage: int
    u: Slot
    v: Slot
    job_u: int
    job_v: int
    dist_before: tuple[int, ...]
    dist_after: tuple[int, ...]
    potential_before: int
    potential_after: int

    def as_dict(self) -> dict:
        return {
            "stage": self.stage,
            "u": list(self.u),
            "v": list(self.v),
            "job_u": self.job_u,
            "job_v": self.job_v,
            "potential_before": self.potential_before,
            "potential_after": self.potential_after,
        }


def potential(assignment: SlotAssignment, dist: dict[Slot, int], stage: int) -> int:
    """``sum rank * distance`` with jobs ranked by size, ascending in stage one and
    descending in stage two, ties by job id. It strictly increases with every swap."""
    jobs = assignment.jobs
    sign = 1 if stage == 1 else -1
    ranked = sorted(range(len(jobs)), key=lambda j: (sign * jobs[j], j))
    return sum((r + 1) * dist[assignment.where[j]] for r, j in enumerate(ranked))


@dataclass
class RoundingResult:
    assignment: SlotAssignment
    records: list[SwapRecord]
    swaps: dict[int, int]

    @property
    def machine_of(self) -> list[int]:
        return self.assignment.assignment()


def _run_stage(assignment: SlotAssignment, bounds: Bounds, stage: int, records: list[SwapRecord] | None,
               limit: int) -> int:
    n = len(assignment.jobs)
    violating = bounds.over if stage == 1 else bounds.under
    count = 0
    while any(violating(i, assignment.loads[i]) for i in range(assignment.m)):
        graph = build_slot_graph(assignment, stage, bounds)
        found = find_swap_bfs(graph, assignment, bounds)
        if found is None:
            bad = [i for i in range(assignment.m) if violating(i, assignment.loads[i])]
            raise LocalSearchError(f"stage {stage}: no swap found, violating machines {bad}, "
                                   f"loads {assignment.loads}")
        count += 1
        if count > limit:
            raise LocalSearchError(f"stage {stage}: more than {limit} swaps")
        u, v = found
        ju, jv = assignment.job_at(u), assignment.job_at(v)
        if records is not None:
            before = slot_distances(graph, n + 1)
            pot_before = potential(assignment, before, stage)
        assignment.swap(u, v)
        if stage == 2:
            for i in (u[0], v[0]):
                if bounds.over(i, assignment.loads[i]):
                    raise LocalSearchError(f"stage 2 pushed machine {i} above its band")
        if records is not None:
            after = slot_distances(build_slot_graph(assignment, stage, bounds), n + 1)
            records.append(SwapRecord(
                stage, u, v, ju, jv,
                tuple(before[sl] for sl in graph.slots),
                tuple(after[sl] for sl in graph.slots),
                pot_before, potential(assignment, after, stage),
            ))
    return count


def round_solution(
    inst: Instance,
    classes: JobClasses,
    x: FractionalAssignment | None,
    y: SlotProfile,
    delta: Fraction | int = 0,
    *,
    instrument: bool = True,
    check: bool = True,
) -> RoundingResult:
    """Integral assignment with every load in ``[l - (delta+eps)p_max, u + (delta+eps)p_max]``.

    ``x`` is the fractional witness for ``y``; with ``check`` it is verified first,
    since swap existence relies on it.
    """
    if check:
        if x is None:
            raise ValueError("a fractional witness is needed to certify the rounding")
        report = check_slot_feasible(inst, classes, x, y, delta)
        if not report.feasible:
            raise ValueError(f"fractional solution infeasible: {[c.name for c in report.failures()]}")
    bounds = Bounds.effective(inst, classes.q, delta)
    assignment = initial_integral(classes, y)
    records: list[SwapRecord] | None = [] if instrument else None
    limit = max(1, inst.n) ** 3
    s1 = _run_stage(assignment, bounds, 1, records, limit)
    s2 = _run_stage(assignment, bounds, 2, records, limit)
    return RoundingResult(assignment, records or [], {1: s1, 2: s2})
