"""
Makespan, max-min load and envy
===============================

The target solver answers "can every machine land in [l, u]?". Scanning a
grid of intervals turns that into three optimisation problems. Here each one
is compared with the exhaustive optimum and with list scheduling.
"""

from fractions import Fraction

from loadbal.applications import greedy_list_schedule, solve_envy, solve_makespan, solve_santa
from loadbal.instance import objective_value
from loadbal.oracle import brute_force_opt

jobs = [13, 4, 9, 17, 6, 6, 11, 2, 8]
m = 3
eps = Fraction(1, 2)
pmax = max(jobs)
print(f"{len(jobs)} jobs on {m} machines, p_max = {pmax}, eps = {eps}")

_, greedy_loads = greedy_list_schedule(jobs, m)

for name, solve in (("makespan", solve_makespan), ("santa", solve_santa), ("envy", solve_envy)):
    res = solve(jobs, m, eps)
    opt = brute_force_opt(jobs, m, name)
    print(f"\n{name}")
    print(f"  scheme  {res.value}  (loads {list(res.loads)})")
    print(f"  optimum {opt}")
    print(f"  greedy  {objective_value(greedy_loads, name)}")
    # the calibration picks q and delta so the whole error fits in eps * p_max
    print(f"  q = {res.calibration.q}, delta = {res.calibration.delta}, "
          f"certified bound {res.certified_bound} <= eps*p_max = {eps * pmax}")
    print(f"  grid point {tuple(str(v) for v in res.grid_point)} after {res.grid_points_tried} tries")
