"""Independent check of a solution document against an instance.

Only the instance model is used here; nothing from the solvers is imported, so
a solver bug cannot hide behind a matching bug in the checker.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .documents import SolutionDocument
from .instance import Instance, Objective, TargetInterval, objective_value, parse_rational


@dataclass
class VerifyReport:
    ok: bool
    lines: list[str] = field(default_factory=list)
    violated: list[int] = field(default_factory=list)

    def text(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return "\n".join(self.lines + [status]) + "\n"


def _targets(inst: Instance, sol: SolutionDocument) -> tuple[list[TargetInterval], Objective]:
    """Intervals the solution promises to meet.

    Objective solves record the guessed interval as ``meta.grid_point``; all
    machines share it. Otherwise the instance's own intervals apply.
    """
    objective = Objective(sol.meta.get("objective", "target"))
    point = sol.meta.get("grid_point")
    if objective is not Objective.TARGET and point is not None:
        lo = parse_rational(point[0], "meta.grid_point[0]")
        hi = parse_rational(point[1], "meta.grid_point[1]")
        return [TargetInterval(lo, hi)] * inst.m, objective
    return list(inst.machines), objective


def verify_solution(
    inst: Instance, sol: SolutionDocument, eps: Fraction | int, delta: Fraction | int = 0
) -> VerifyReport:
    """Recompute loads and test each against ``[l - (eps+delta)p_max, u + (eps+delta)p_max]``."""
    eps, delta = Fraction(eps), Fraction(delta)
    rep = VerifyReport(True)
    if len(sol.assignment) != inst.n:
        rep.ok = False
        rep.lines.append(f"assignment has {len(sol.assignment)} entries for {inst.n} jobs")
        return rep
    bad = [j for j, i in enumerate(sol.assignment) if not 0 <= i < inst.m]
    if bad:
        rep.ok = False
        rep.lines.append(f"jobs {bad} assigned to nonexistent machines")
        return rep
    loads = [Fraction(0)] * inst.m
    for j, i in enumerate(sol.assignment):
        loads[i] += inst.jobs[j]
    if list(sol.loads) != loads:
        rep.ok = False
        rep.lines.append("reported loads differ from the recomputed loads")
    targets, objective = _targets(inst, sol)
    band = (eps + delta) * inst.p_max
    for i, (load, t) in enumerate(zip(loads, targets)):
        lo, hi = t.lower - band, t.upper + band
        if lo <= load <= hi:
            rep.lines.append(f"machine {i}: load {load} in [{lo}, {hi}]")
        else:
            rep.ok = False
            rep.violated.append(i)
            rep.lines.append(f"machine {i}: load {load} outside [{lo}, {hi}] VIOLATION")
    if objective is not Objective.TARGET and objective_value(loads, objective) != sol.objective_value:
        rep.ok = False
        rep.lines.append(f"objective_value {sol.objective_value} does not match the loads")
    return rep
