"""
Target load balancing, one stage at a time
==========================================

Six jobs, three machines, and a load interval per machine. We run the
relaxation solver, rebuild a fractional assignment from its output, round it
by swaps and finally check the result with the independent verifier.
"""

from fractions import Fraction

from loadbal import Instance, TargetInterval, classify_jobs
from loadbal.documents import make_solution
from loadbal.dp import solve_slot_milp_dp
from loadbal.fractional import build_fractional
from loadbal.local_search import loads, round_solution
from loadbal.verify import verify_solution

jobs = (7, 3, 5, 2, 6, 1)
machines = (
    TargetInterval(Fraction(8), Fraction(9)),
    TargetInterval(Fraction(8), Fraction(9)),
    TargetInterval(Fraction(6), Fraction(6)),
)
inst = Instance(jobs, machines)

# q = 2 splits the jobs into two size classes at p_max / 2
q = 2
classes = classify_jobs(inst, q)
for k, members in enumerate(classes.classes):
    print(f"class {k}: sizes {[jobs[j] for j in members]}")

# the DP guesses, machine by machine, how many slots of each class it gets
# (y) and the average size of the jobs in them (z); delta widens every
# interval by delta * p_max
delta = Fraction(1, inst.n)
sol = solve_slot_milp_dp(inst, classes, delta)
print("machine order:", sol.order)
print("slots y:", sol.y)
print("average sizes z:", [[str(v) for v in row] for row in sol.z])
print("DP states touched:", sol.stats["states"])

# fill slots greedily with the smallest jobs, then move mass around until each
# class holds exactly the volume y * z promised
x, trace = build_fractional(inst, classes, sol.order, sol.y, sol.z, delta)
print("repair swaps:", trace.count())
for i in range(inst.m):
    print(f"machine {i} fractional load {x.load(i, jobs)}")

# swap whole jobs within a class until every load sits in the rounding band
res = round_solution(inst, classes, x, sol.y, delta)
print("assignment:", res.machine_of, "loads:", [str(v) for v in loads(res.assignment)])
print("swaps per stage:", res.swaps)

# the verifier knows nothing about the solver: it recomputes loads and checks
# them against [l - (eps + delta) p_max, u + (eps + delta) p_max]
doc = make_solution(res.machine_of, loads(res.assignment), 0, (Fraction(1, q) + delta) * inst.p_max)
print(verify_solution(inst, doc, Fraction(1, q), delta).text())

# the guarantee is additive: an exact assignment exists here, but the scheme
# only promises loads within the band around each interval
from loadbal.oracle import brute_force_target

print("an exact assignment:", brute_force_target(inst))
