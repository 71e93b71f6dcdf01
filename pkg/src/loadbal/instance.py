"""Problem data: jobs, per-machine target intervals, size classes.

Everything numeric is either an ``int`` (processing times, counts) or a
``fractions.Fraction`` (interval bounds and anything derived from them).
Floats never enter the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import accumulate
from typing import Any, Mapping, Sequence


class InstanceError(ValueError):
    """Raised for malformed instance data."""


def parse_rational(value: Any, what: str = "value") -> Fraction:
    """Parse an int or an ``"a/b"`` / ``"a"`` string into a Fraction.

    Floats and booleans are rejected so that no binary rounding can sneak in.
    """
    if isinstance(value, bool):
        raise InstanceError(f"{what}: expected integer or rational string, got bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        num, sep, den = text.partition("/")
        try:
            a = int(num)
            b = int(den) if sep else 1
        except ValueError:
            raise InstanceError(f"{what}: cannot parse {value!r} as a rational") from None
        if b < 1:
            raise InstanceError(f"{what}: denominator must be >= 1 in {value!r}")
        return Fraction(a, b)
    raise InstanceError(f"{what}: expected integer or rational string, got {type(value).__name__}")


def format_rational(value: Fraction | int) -> str | int:
    """Inverse of :func:`parse_rational` for JSON output (bare ints when integral)."""
    value = Fraction(value)
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True, order=True)
class TargetInterval:
    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", Fraction(self.lower))
        object.__setattr__(self, "upper", Fraction(self.upper))
        if self.lower < 0:
            raise InstanceError("target interval: lower must be >= 0")
        if self.lower > self.upper:
            raise InstanceError("target interval: lower > upper")

    def __contains__(self, load: Fraction | int) -> bool:
        return self.lower <= load <= self.upper


@dataclass(frozen=True)
class Instance:
    """Jobs with positive integer sizes and one target interval per machine."""

    jobs: tuple[int, ...]
    machines: tuple[TargetInterval, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "machines", tuple(self.machines))
        for j, p in enumerate(self.jobs):
            if isinstance(p, bool) or not isinstance(p, int):
                raise InstanceError(f"job {j}: processing time must be an integer")
            if p < 1:
                raise InstanceError(f"job {j}: processing time must be ≥ 1")
        if not self.machines:
            raise InstanceError("instance needs at least one machine")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def m(self) -> int:
        return len(self.machines)

    @property
    def p_max(self) -> int:
        return max(self.jobs, default=0)

    @property
    def total(self) -> int:
        return sum(self.jobs)

    @classmethod
    def uniform(cls, jobs: Sequence[int], m: int, lower: Fraction | int, upper: Fraction | int) -> Instance:
        """All ``m`` machines share the interval ``[lower, upper]``."""
        if m < 1:
            raise InstanceError("instance needs at least one machine")
        return cls(tuple(jobs), (TargetInterval(Fraction(lower), Fraction(upper)),) * m)


def validate_instance(raw: Mapping[str, Any]) -> Instance:
    """Build an :class:`Instance` from a decoded instance document.

    Expected shape: ``{"jobs": [int, ...], "machines": [{"lower": r, "upper": r}, ...]}``
    where ``r`` is an int or an ``"a/b"`` string. A machine may also be given as a
    two-element list ``[lower, upper]``.
    """
    if not isinstance(raw, Mapping):
        raise InstanceError("instance document must be an object")
    if "jobs" not in raw:
        raise InstanceError("jobs: missing field")
    if "machines" not in raw:
        raise InstanceError("machines: missing field")
    jobs_raw = raw["jobs"]
    machines_raw = raw["machines"]
    if not isinstance(jobs_raw, list):
        raise InstanceError("jobs: expected an array")
    if not isinstance(machines_raw, list):
        raise InstanceError("machines: expected an array")

    jobs = []
    for j, p in enumerate(jobs_raw):
        if isinstance(p, bool) or not isinstance(p, int):
            raise InstanceError(f"job {j}: processing time must be an integer")
        if p < 1:
            raise InstanceError(f"job {j}: processing time must be ≥ 1")
        jobs.append(p)

    if not machines_raw:
        raise InstanceError("machines: at least one machine is required")
    machines = []
    for i, entry in enumerate(machines_raw):
        if isinstance(entry, Mapping):
            if "lower" not in entry or "upper" not in entry:
                raise InstanceError(f"machine {i}: needs 'lower' and 'upper'")
            lo_raw, hi_raw = entry["lower"], entry["upper"]
        elif isinstance(entry, (list, tuple)) and len(entry) == 2:
            lo_raw, hi_raw = entry
        else:
            raise InstanceError(f"machine {i}: expected {{'lower', 'upper'}} object")
        lo = parse_rational(lo_raw, f"machine {i}: lower")
        hi = parse_rational(hi_raw, f"machine {i}: upper")
        if lo < 0:
            raise InstanceError(f"machine {i}: lower must be ≥ 0")
        if lo > hi:
            raise InstanceError(f"machine {i}: lower > upper")
        machines.append(TargetInterval(lo, hi))
    return Instance(tuple(jobs), tuple(machines))


def instance_to_document(inst: Instance) -> dict[str, Any]:
    return {
        "jobs": list(inst.jobs),
        "machines": [
            {"lower": format_rational(t.lower), "upper": format_rational(t.upper)} for t in inst.machines
        ],
    }


@dataclass(frozen=True)
class Epsilon:
    """Accuracy parameter restricted to unit fractions ``1/q``."""

    q: int

    def __post_init__(self) -> None:
        if isinstance(self.q, bool) or not isinstance(self.q, int) or self.q < 1:
            raise InstanceError("epsilon: q must be a positive integer")

    @property
    def value(self) -> Fraction:
        return Fraction(1, self.q)


def class_of(p: int, p_max: int, q: int) -> int:
    """0-based size class of a job: ``p`` lies in ``(k*p_max/q, (k+1)*p_max/q]``."""
    # smallest k+1 with p <= (k+1)*p_max/q, i.e. ceil(p*q/p_max)
    return -(-p * q // p_max) - 1


@dataclass(frozen=True)
class JobClasses:
    """Partition of the jobs into ``q`` size bands.

    Classes are 0-based here: class ``k`` holds jobs with
    ``k*p_max/q < p <= (k+1)*p_max/q``. Within a class, jobs are kept sorted by
    ``(size, job id)`` and ``prefix[k][t]`` is the total size of the ``t``
    smallest ones.
    """

    q: int
    p_max: int
    classes: tuple[tuple[int, ...], ...]
    sizes: tuple[tuple[int, ...], ...]
    prefix: tuple[tuple[int, ...], ...]
    class_index: tuple[int, ...] = field(repr=False)
    jobs: tuple[int, ...] = field(repr=False)

    @property
    def eps(self) -> Fraction:
        return Fraction(1, self.q)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @property
    def totals(self) -> tuple[int, ...]:
        return tuple(p[-1] for p in self.prefix)

    @property
    def n(self) -> int:
        return len(self.class_index)

    def prefix_sum(self, k: int, count: int) -> int:
        return self.prefix[k][count]

    def lower_edge(self, k: int) -> Fraction:
        return Fraction(k * self.p_max, self.q)

    def upper_edge(self, k: int) -> Fraction:
        return Fraction((k + 1) * self.p_max, self.q)


def classify_jobs(inst: Instance, eps: Epsilon | int) -> JobClasses:
    q = eps.q if isinstance(eps, Epsilon) else Epsilon(eps).q
    if inst.n == 0:
        raise InstanceError("empty instance: no jobs to classify")
    p_max = inst.p_max
    buckets: list[list[int]] = [[] for _ in range(q)]
    index = []
    for j, p in enumerate(inst.jobs):
        k = class_of(p, p_max, q)
        buckets[k].append(j)
        index.append(k)
    classes = []
    sizes = []
    prefix = []
    for bucket in buckets:
        bucket.sort(key=lambda j: (inst.jobs[j], j))
        s = tuple(inst.jobs[j] for j in bucket)
        classes.append(tuple(bucket))
        sizes.append(s)
        prefix.append(tuple(accumulate(s, initial=0)))
    return JobClasses(q, p_max, tuple(classes), tuple(sizes), tuple(prefix), tuple(index), inst.jobs)


@dataclass(frozen=True)
class IntervalCatalog:
    """Distinct target intervals in ``(lower, upper)`` order, with multiplicities."""

    intervals: tuple[TargetInterval, ...]
    counts: tuple[int, ...]
    machine_type: tuple[int, ...]

    @property
    def K(self) -> int:
        return len(self.intervals)

    def machines_of(self, r: int) -> list[int]:
        return [i for i, t in enumerate(self.machine_type) if t == r]


def interval_catalog(inst: Instance) -> IntervalCatalog:
    distinct = sorted(set(inst.machines), key=lambda t: (t.lower, t.upper))
    pos = {t: r for r, t in enumerate(distinct)}
    mtype = tuple(pos[t] for t in inst.machines)
    counts = tuple(mtype.count(r) for r in range(len(distinct)))
    return IntervalCatalog(tuple(distinct), counts, mtype)


class Objective(str, Enum):
    TARGET = "target"
    MAKESPAN = "makespan"
    SANTA = "santa"
    ENVY = "envy"


def objective_value(loads: Sequence[Fraction | int], objective: Objective | str) -> Fraction:
    """Makespan, minimum load or envy of a load vector (target has no value: 0)."""
    objective = Objective(objective)
    if objective is Objective.MAKESPAN:
        return Fraction(max(loads))
    if objective is Objective.SANTA:
        return Fraction(min(loads))
    if objective is Objective.ENVY:
        return Fraction(max(loads) - min(loads))
    return Fraction(0)


def loads_of(jobs: Sequence[int], assignment: Sequence[int], m: int) -> list[int]:
    loads = [0] * m
    for j, i in enumerate(assignment):
        loads[i] += jobs[j]
    return loads
