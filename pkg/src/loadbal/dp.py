"""Dynamic program for the delta-relaxed slot problem.

Machines are guessed one after another in the order they will appear in the
monotone ordering. For every machine the program picks an interval type, the
slot counts ``y`` per class and grid-valued average sizes ``z`` per class. A
state remembers only what later machines need: how many machines of every
type are placed, the previous machine's ``z``, how many jobs of each class
are placed and the accumulated class volume ``S``.

All grid arithmetic is done in integer multiples of ``Grid.unit``; every job
size, every grid point and every state volume is such a multiple, so nothing
is ever rounded after the initial grid choice.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

from .instance import Instance, IntervalCatalog, JobClasses, interval_catalog
from .relaxation import SlotProfile

DEFAULT_MAX_STATES = 5_000_000


def default_max_states() -> int:
    env = os.environ.get("LOADBAL_MAX_STATES")
    if env:
        return int(env)
    return DEFAULT_MAX_STATES


class StateBudgetExceeded(RuntimeError):
    """The search touched more states than allowed. Not an infeasibility verdict."""


@dataclass(frozen=True)
class Grid:
    """Discretisation of average sizes: multiples of ``step`` up to ``cap``.

    ``cap`` (= p_max) is itself part of the domain even when it is not a
    multiple of ``step``. ``unit`` divides ``step`` and 1, so every integer
    size and every grid value is an integral number of units.
    """

    step: Fraction
    cap: Fraction
    unit: Fraction
    step_units: int
    cap_units: int

    @classmethod
    def build(cls, n: int, q: int, p_max: int, delta: Fraction) -> Grid:
        if n < 1:
            raise ValueError("grid needs n >= 1")
        delta = Fraction(delta)
        if delta <= 0:
            raise ValueError("delta must be positive")
        step = delta * p_max / (q * n)
        unit = Fraction(1, step.denominator)
        return cls(step, Fraction(p_max), unit, step.numerator, p_max * step.denominator)

    def to_units(self, value: Fraction | int) -> int:
        u = Fraction(value) / self.unit
        if u.denominator != 1:
            raise ValueError(f"{value} is not a multiple of the grid unit {self.unit}")
        return u.numerator

    def value(self, units: int) -> Fraction:
        return units * self.unit

    def ceil_units(self, value: Fraction | int) -> int:
        return math.ceil(Fraction(value) / self.unit)

    def floor_units(self, value: Fraction | int) -> int:
        return math.floor(Fraction(value) / self.unit)

    def in_domain(self, units: int) -> bool:
        return 0 <= units <= self.cap_units and (units % self.step_units == 0 or units == self.cap_units)

    def round_up(self, units: int) -> int | None:
        """Smallest domain point >= ``units`` (None past the cap)."""
        if units <= 0:
            return 0
        if units > self.cap_units:
            return None
        g = -(-units // self.step_units) * self.step_units
        return min(g, self.cap_units)

    def round_down(self, units: int) -> int | None:
        if units < 0:
            return None
        if units >= self.cap_units:
            return self.cap_units
        return units // self.step_units * self.step_units

    def points(self, lo: int, hi: int) -> Iterator[int]:
        """Domain points in ``[lo, hi]`` ascending."""
        start = self.round_up(lo)
        if start is None:
            return
        s = self.step_units
        v = start
        while v <= hi:
            yield v
            if v == self.cap_units:
                return
            v += s
            if v > self.cap_units:
                v = self.cap_units


class DPState(NamedTuple):
    """Search state; ``z_prev`` and ``S`` are in grid units."""

    i: int
    placed: tuple[int, ...]
    z_prev: tuple[int, ...]
    filled: tuple[int, ...]
    S: tuple[int, ...]


class MachineGuess(NamedTuple):
    """Next machine: interval type, slot counts and average sizes (grid units)."""

    r: int
    y: tuple[int, ...]
    z: tuple[int, ...]


@dataclass(frozen=True)
class Rejected:
    condition: int
    detail: str

    def __bool__(self) -> bool:
        return False


@dataclass
class DPStats:
    states: int = 0
    transitions: int = 0
    rejected: dict[int, int] = field(default_factory=lambda: {1: 0, 2: 0, 3: 0, 4: 0})
    pruned: int = 0

    def as_dict(self) -> dict[str, int]:
        out = {"states": self.states, "transitions": self.transitions, "pruned": self.pruned}
        out.update({f"rejected_{c}": v for c, v in self.rejected.items()})
        return out


@dataclass(frozen=True)
class Infeasible:
    """The relaxation has no solution (a verdict, unlike StateBudgetExceeded)."""

    reason: str
    stats: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class SlotMilpSolution:
    order: tuple[int, ...]
    y: SlotProfile
    z: tuple[tuple[Fraction, ...], ...]
    delta: Fraction
    guesses: tuple[MachineGuess, ...]
    stats: dict[str, int] = field(default_factory=dict)


class DPContext:
    """Instance data pre-converted to grid units."""

    def __init__(self, inst: Instance, classes: JobClasses, delta: Fraction | int,
                 catalog: IntervalCatalog | None = None):
        if inst.n < 1:
            raise ValueError("dynamic program needs at least one job")
        self.inst = inst
        self.classes = classes
        self.catalog = catalog or interval_catalog(inst)
        self.delta = Fraction(delta)
        self.q = classes.q
        self.m = inst.m
        g = self.grid = Grid.build(inst.n, classes.q, classes.p_max, self.delta)
        to = g.to_units
        self.counts = classes.counts
        self.T = tuple(to(t) for t in classes.totals)
        # class total may exceed the exact total by delta * eps * p_max = n grid steps
        self.Tmax = tuple(t + inst.n * g.step_units for t in self.T)
        self.P = tuple(tuple(to(v) for v in pre) for pre in classes.prefix)
        zlo = []
        zhi = []
        for k, sizes in enumerate(classes.sizes):
            if sizes:
                zlo.append(g.round_up(to(sizes[0])))
                zhi.append(g.round_up(to(sizes[-1])))
            else:
                zlo.append(0)
                zhi.append(0)
        self.zlo = tuple(zlo)
        self.zhi = tuple(zhi)
        slack = self.delta * classes.p_max
        self.lo = tuple(g.ceil_units(t.lower) for t in self.catalog.intervals)
        self.hi = tuple(g.floor_units(t.upper + slack) for t in self.catalog.intervals)
        self.active = tuple(k for k in range(self.q) if self.counts[k] > 0)

    def initial(self) -> DPState:
        zero = (0,) * self.q
        return DPState(0, (0,) * self.catalog.K, zero, zero, zero)

    def z_fractions(self, z: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(self.grid.value(v) for v in z)


def dp_transition(ctx: DPContext, state: DPState, guess: MachineGuess) -> DPState | Rejected:
    """Place one more machine; reject unless all four ordering conditions hold.

    1. class volume so far stays within the relaxed total,
    2. average sizes do not decrease (entries with no slots are skipped),
    3. class volume so far covers the smallest jobs placed so far,
    4. the machine's own load respects its (upper-relaxed) interval.
    """
    r, y, z = guess
    if state.i >= ctx.m:
        raise ValueError("all machines already placed")
    if state.placed[r] >= ctx.catalog.counts[r]:
        raise ValueError(f"no machine of type {r} left")
    q = ctx.q
    new_z = list(state.z_prev)
    new_f = list(state.filled)
    new_S = list(state.S)
    load = 0
    for k in range(q):
        yk = y[k]
        if yk < 0 or state.filled[k] + yk > ctx.counts[k]:
            raise ValueError(f"class {k}: slot count {yk} exceeds remaining jobs")
        if yk == 0:
            continue
        zk = z[k]
        if not ctx.grid.in_domain(zk):
            raise ValueError(f"class {k}: z={zk} units is not a grid point")
        if zk < state.z_prev[k]:
            return Rejected(2, f"class {k}: z decreases")
        new_z[k] = zk
        new_f[k] += yk
        new_S[k] += yk * zk
        load += yk * zk
        if new_S[k] > ctx.Tmax[k]:
            return Rejected(1, f"class {k}: volume exceeds relaxed total")
        if new_S[k] < ctx.P[k][new_f[k]]:
            return Rejected(3, f"class {k}: volume below smallest-jobs bound")
    if not ctx.lo[r] <= load <= ctx.hi[r]:
        return Rejected(4, f"machine load outside interval type {r}")
    placed = list(state.placed)
    placed[r] += 1
    return DPState(state.i + 1, tuple(placed), tuple(new_z), tuple(new_f), tuple(new_S))


def accept_final(ctx: DPContext, state: DPState) -> bool:
    if state.i != ctx.m or state.placed != ctx.catalog.counts:
        return False
    return all(
        state.filled[k] == ctx.counts[k] and ctx.T[k] <= state.S[k] <= ctx.Tmax[k]
        for k in range(ctx.q)
    )


def _dead(ctx: DPContext, s: DPState) -> bool:
    """True when no sequence of remaining machines can reach an accepting state."""
    vmin = 0
    vmax = 0
    for k in ctx.active:
        rest = ctx.counts[k] - s.filled[k]
        if rest == 0:
            if s.S[k] < ctx.T[k]:
                return True
            continue
        zmin = max(s.z_prev[k], ctx.zlo[k])
        if s.S[k] + rest * zmin > ctx.Tmax[k]:
            return True
        if s.S[k] + rest * ctx.zhi[k] < ctx.T[k]:
            return True
        vmin += max(ctx.T[k] - s.S[k], rest * zmin)
        vmax += ctx.Tmax[k] - s.S[k]
    need_lo = 0
    need_hi = 0
    for r, c in enumerate(ctx.catalog.counts):
        left = c - s.placed[r]
        need_lo += left * ctx.lo[r]
        need_hi += left * ctx.hi[r]
    return need_lo > vmax or need_hi < vmin


def _z_window(ctx: DPContext, s: DPState, k: int, yk: int) -> tuple[int, int]:
    rest = ctx.counts[k] - s.filled[k]
    lo = max(s.z_prev[k], ctx.zlo[k])
    # prefix bound after taking yk more jobs
    lo = max(lo, -(-(ctx.P[k][s.filled[k] + yk] - s.S[k]) // yk))
    # later slots of this class need at least as much, so they can add at most zhi each
    lo = max(lo, -(-(ctx.T[k] - s.S[k] - (rest - yk) * ctx.zhi[k]) // yk))
    # later slots carry at least z each
    hi = min(ctx.zhi[k], (ctx.Tmax[k] - s.S[k]) // rest)
    return lo, hi


def _guesses(ctx: DPContext, s: DPState) -> Iterator[MachineGuess]:
    """Candidate next machines in canonical order: type, then y, then z ascending."""
    q = ctx.q
    active = ctx.active
    last = s.i == ctx.m - 1
    open_classes = [k for k in active if s.filled[k] < ctx.counts[k]]
    vol_lo = sum(ctx.T[k] - s.S[k] for k in open_classes)
    vol_hi = sum(ctx.Tmax[k] - s.S[k] for k in open_classes)
    for r, c in enumerate(ctx.catalog.counts):
        if s.placed[r] >= c:
            continue
        # the machines after this one need between need_lo and need_hi of what is left
        need_lo = need_hi = 0
        for rr, cc in enumerate(ctx.catalog.counts):
            left = cc - s.placed[rr] - (rr == r)
            need_lo += left * ctx.lo[rr]
            need_hi += left * ctx.hi[rr]
        lo_r = max(ctx.lo[r], vol_lo - need_hi)
        hi_r = min(ctx.hi[r], vol_hi - need_lo)
        if lo_r > hi_r:
            continue
        y = [0] * q
        windows: list[tuple[int, int]] = [(0, 0)] * q

        def fill_z(t: int, z: list[int], load: int, slack_min: int) -> Iterator[MachineGuess]:
            # slack_min: minimum load still to come from classes after position t
            if t == len(active):
                if lo_r <= load:
                    yield MachineGuess(r, tuple(y), tuple(z))
                return
            k = active[t]
            yk = y[k]
            if yk == 0:
                yield from fill_z(t + 1, z, load, slack_min)
                return
            lo, hi = windows[k]
            rest_min = slack_min - yk * lo
            rest_max = sum(y[kk] * windows[kk][1] for kk in active[t + 1:])
            for zk in ctx.grid.points(lo, hi):
                new_load = load + yk * zk
                if new_load + rest_min > hi_r:
                    break
                if new_load + rest_max < lo_r:
                    continue
                z[k] = zk
                yield from fill_z(t + 1, z, new_load, rest_min)
            z[k] = s.z_prev[k]

        def fill_y(t: int, min_load: int) -> Iterator[MachineGuess]:
            if t == len(active):
                max_load = sum(y[k] * windows[k][1] for k in active)
                if max_load < lo_r:
                    return
                yield from fill_z(0, list(s.z_prev), 0, min_load)
                return
            k = active[t]
            rest = ctx.counts[k] - s.filled[k]
            choices = [rest] if last else range(rest + 1)
            for yk in choices:
                y[k] = yk
                if yk == 0:
                    windows[k] = (s.z_prev[k], s.z_prev[k])
                    yield from fill_y(t + 1, min_load)
                    continue
                if min_load + yk * max(s.z_prev[k], ctx.zlo[k]) > hi_r:
                    # larger yk only adds load
                    break
                lo, hi = _z_window(ctx, s, k, yk)
                lo_g = ctx.grid.round_up(lo)
                hi_g = ctx.grid.round_down(hi)
                if lo_g is None or hi_g is None or lo_g > hi_g or min_load + yk * lo_g > hi_r:
                    continue
                windows[k] = (lo_g, hi_g)
                yield from fill_y(t + 1, min_load + yk * lo_g)
            y[k] = 0

        yield from fill_y(0, 0)


def reconstruct(ctx: DPContext, memo: dict[DPState, tuple[DPState | None, MachineGuess | None]],
                final: DPState, stats: dict[str, int] | None = None) -> SlotMilpSolution:
    """Walk parent links back from an accepting state and name concrete machines."""
    guesses: list[MachineGuess] = []
    cur: DPState | None = final
    while cur is not None:
        parent, guess = memo[cur]
        if guess is not None:
            guesses.append(guess)
        cur = parent
    guesses.reverse()
    pools = [iter(ctx.catalog.machines_of(r)) for r in range(ctx.catalog.K)]
    order = []
    y_rows: list[tuple[int, ...]] = [()] * ctx.m
    z_rows: list[tuple[Fraction, ...]] = [()] * ctx.m
    zp = [0] * ctx.q
    for g in guesses:
        i = next(pools[g.r])
        order.append(i)
        zfull = tuple(g.z[k] if g.y[k] else zp[k] for k in range(ctx.q))
        zp = list(zfull)
        y_rows[i] = tuple(g.y)
        z_rows[i] = ctx.z_fractions(zfull)
    return SlotMilpSolution(tuple(order), tuple(y_rows), tuple(z_rows), ctx.delta, tuple(guesses), dict(stats or {}))


def solve_slot_milp_dp(
    inst: Instance,
    classes: JobClasses,
    delta: Fraction | int | None = None,
    *,
    max_states: int | None = None,
) -> SlotMilpSolution | Infeasible:
    """Find grid vectors ``(order, y, z)`` meeting the ordering conditions, or prove
    the exact relaxation infeasible.

    ``delta`` defaults to ``1/n``. Raises :class:`StateBudgetExceeded` when more
    than ``max_states`` states are touched.
    """
    if inst.n < 1:
        raise ValueError("dynamic program needs at least one job")
    if delta is None:
        delta = Fraction(1, inst.n)
    budget = default_max_states() if max_states is None else max_states
    ctx = DPContext(inst, classes, delta)
    stats = DPStats()
    start = ctx.initial()
    memo: dict[DPState, tuple[DPState | None, MachineGuess | None]] = {start: (None, None)}
    stats.states = 1

    if _dead(ctx, start):
        return Infeasible("volume bounds cannot be met", stats.as_dict())

    # depth-first over the same state space a forward pass would sweep; stops at the
    # first accepting state and never revisits a state
    stack: list[tuple[DPState, Iterator[MachineGuess]]] = [(start, _guesses(ctx, start))]
    while stack:
        state, it = stack[-1]
        advanced = False
        for guess in it:
            stats.transitions += 1
            nxt = dp_transition(ctx, state, guess)
            if isinstance(nxt, Rejected):
                stats.rejected[nxt.condition] += 1
                continue
            if nxt in memo:
                continue
            memo[nxt] = (state, guess)
            stats.states += 1
            if stats.states > budget:
                raise StateBudgetExceeded(f"more than {budget} DP states")
            if nxt.i == ctx.m:
                if accept_final(ctx, nxt):
                    return reconstruct(ctx, memo, nxt, stats.as_dict())
                continue
            if _dead(ctx, nxt):
                stats.pruned += 1
                continue
            stack.append((nxt, _guesses(ctx, nxt)))
            advanced = True
            break
        if not advanced:
            stack.pop()
    return Infeasible("no accepting state", stats.as_dict())
