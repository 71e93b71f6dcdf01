"""
Watching the swap search
========================

Start from a deliberately bad filling (small jobs on machine 0, large jobs
on machine 1) and let the breadth-first swap search repair it. Each swap
record carries the slot distances before and after and the potential that
bounds the number of swaps.
"""

from fractions import Fraction

from loadbal import Instance, classify_jobs
from loadbal.local_search import initial_integral, loads, round_solution
from loadbal.relaxation import FractionalAssignment

jobs = [1, 2, 2, 3, 8, 9, 9, 10]
inst = Instance.uniform(jobs, 2, 22, 22)
classes = classify_jobs(inst, 1)
y = tuple(tuple(c // 2 for c in classes.counts) for _ in range(2))

start = initial_integral(classes, y)
print("initial loads:", start.loads, "band:", Fraction(inst.p_max, classes.q))

# x = 1/2 everywhere certifies that y admits a fractional solution
x = FractionalAssignment(2, inst.n)
for i in range(2):
    for j in range(inst.n):
        x[i, j] = Fraction(1, 2)

res = round_solution(inst, classes, x, y)
for rec in res.records:
    print(f"stage {rec.stage}: swap jobs {jobs[rec.job_u]} <-> {jobs[rec.job_v]}, "
          f"potential {rec.potential_before} -> {rec.potential_after}")
    print(f"  distances {rec.dist_before} -> {rec.dist_after}")
print("final loads:", [str(v) for v in loads(res.assignment)])
