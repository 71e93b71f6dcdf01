"""Turn grid vectors ``(order, y, z)`` into a fractional assignment.

Per class, jobs are first handed out greedily in size order along the machine
order. Then, machine by machine, any machine whose class volume exceeds
``y * z`` trades mass of one of its large jobs against mass of a small job
held by an earlier machine that still has room, until it fits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .instance import Instance, JobClasses
from .relaxation import FractionalAssignment, SlotProfile, check_ordering_conditions

ZERO = Fraction(0)


class RepairError(RuntimeError):
    """No donor could be found for an overloaded machine; the inputs broke a precondition."""


@dataclass(frozen=True)
class Swap:
    receiver: int
    donor: int
    big_job: int
    small_job: int
    alpha: Fraction
    reason: str  # receiver-satisfied | donor-tight | x_ij-zero | x_i'j'-zero


@dataclass
class RepairTrace:
    swaps: dict[int, list[Swap]] = field(default_factory=dict)

    def count(self) -> int:
        return sum(len(v) for v in self.swaps.values())

    def per_machine(self) -> dict[tuple[int, int], int]:
        """Number of swaps per (class, receiving machine)."""
        out: dict[tuple[int, int], int] = {}
        for k, swaps in self.swaps.items():
            for s in swaps:
                out[k, s.receiver] = out.get((k, s.receiver), 0) + 1
        return out

    def as_dict(self) -> dict[str, list[dict]]:
        return {
            str(k): [
                {
                    "receiver": s.receiver,
                    "donor": s.donor,
                    "big_job": s.big_job,
                    "small_job": s.small_job,
                    "alpha": f"{s.alpha.numerator}/{s.alpha.denominator}",
                    "reason": s.reason,
                }
                for s in swaps
            ]
            for k, swaps in sorted(self.swaps.items())
        }


def greedy_prefix_assign(
    classes: JobClasses, order: Sequence[int], y: SlotProfile, k: int, m: int | None = None
) -> FractionalAssignment:
    """Hand the class-``k`` jobs, smallest first, to machines in ``order``."""
    members = classes.classes[k]
    total = sum(y[i][k] for i in order)
    if total != len(members):
        raise ValueError(f"class {k}: {total} slots for {len(members)} jobs")
    x = FractionalAssignment(len(y) if m is None else m, len(classes.jobs))
    pos = 0
    for i in order:
        for j in members[pos:pos + y[i][k]]:
            x[i, j] = Fraction(1)
        pos += y[i][k]
    return x


def repair_overload(
    x: FractionalAssignment,
    classes: JobClasses,
    order: Sequence[int],
    y: SlotProfile,
    z: Sequence[Sequence[Fraction]],
    k: int,
    position: int,
) -> list[Swap]:
    """Fix the class-``k`` volume of the machine at ``position`` in place.

    Earlier positions must already satisfy ``volume <= y * z``. Each swap moves
    ``alpha`` mass of a job larger than the receiver's ``z`` out and the same mass
    of a job smaller than the donor's ``z`` in, with ``alpha`` as large as possible.
    """
    jobs = classes.jobs
    members = classes.classes[k]
    i = order[position]
    cap = y[i][k] * Fraction(z[i][k])
    zi = Fraction(z[i][k])
    load = x.class_volume(i, members, jobs)
    swaps: list[Swap] = []
    used: set[tuple[int, int]] = set()
    while load > cap:
        donor = None
        for t in range(position):
            d = order[t]
            if y[d][k] and x.class_volume(d, members, jobs) < y[d][k] * Fraction(z[d][k]):
                donor = d
                break
        if donor is None:
            raise RepairError(f"class {k}: machine {i} overloaded but no earlier machine has room")
        zd = Fraction(z[donor][k])
        small = next((j for j in members if jobs[j] < zd and x[donor, j] > 0), None)
        big = next((j for j in reversed(members) if jobs[j] > zi and x[i, j] > 0), None)
        if small is None or big is None:
            raise RepairError(f"class {k}: no eligible job pair between machines {donor} and {i}")
        if (big, small) in used:
            raise RepairError(f"class {k}: job pair {(big, small)} reused for machine {i}")
        used.add((big, small))
        gap = jobs[big] - jobs[small]
        donor_load = x.class_volume(donor, members, jobs)
        limits = [
            ((load - cap) / gap, "receiver-satisfied"),
            ((y[donor][k] * zd - donor_load) / gap, "donor-tight"),
            (x[i, big], "x_ij-zero"),
            (x[donor, small], "x_i'j'-zero"),
        ]
        alpha, reason = min(limits, key=lambda t: t[0])
        assert alpha > 0
        x.add(i, big, -alpha)
        x.add(i, small, alpha)
        x.add(donor, small, -alpha)
        x.add(donor, big, alpha)
        load -= alpha * gap
        swaps.append(Swap(i, donor, big, small, alpha, reason))
    return swaps


def build_fractional(
    inst: Instance,
    classes: JobClasses,
    order: Sequence[int],
    y: SlotProfile,
    z: Sequence[Sequence[Fraction]],
    delta: Fraction | int,
    *,
    check: bool = True,
) -> tuple[FractionalAssignment, RepairTrace]:
    """Fractional assignment whose class volumes sit in ``[y*z - delta*eps*p_max, y*z]``."""
    if check:
        report = check_ordering_conditions(inst, classes, order, y, z, delta)
        if not report.ok:
            raise ValueError("ordering conditions violated: " + "; ".join(report.failures()))
    x = FractionalAssignment(inst.m, inst.n)
    trace = RepairTrace()
    for k in range(classes.q):
        if not classes.classes[k]:
            continue
        xk = greedy_prefix_assign(classes, order, y, k, inst.m)
        swaps: list[Swap] = []
        for position in range(1, len(order)):
            swaps.extend(repair_overload(xk, classes, order, y, z, k, position))
        if swaps:
            trace.swaps[k] = swaps
        for i in range(inst.m):
            x.rows[i].update(xk.rows[i])
    return x, trace
