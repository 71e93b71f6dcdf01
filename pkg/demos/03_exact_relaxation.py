"""
The relaxation solved exactly
=============================

At tiny sizes the relaxation can be decided without approximation: list
every slot profile (how many jobs of each class each machine takes) and ask
a linear program whether jobs can be spread fractionally to match it.
"""

from fractions import Fraction

from loadbal.instance import Instance, classify_jobs, interval_catalog
from loadbal.dp import solve_slot_milp_dp
from loadbal.exact import enumerate_type_guesses, lp_feasible, slot_lp, solve_slot_milp_exact
from loadbal.oracle import brute_force_target

inst = Instance.uniform([1, 1, 4, 4], 2, 4, 6)
classes = classify_jobs(inst, 2)
catalog = interval_catalog(inst)

# both machines share one interval, so profiles are multisets of vectors
full = list(enumerate_type_guesses(classes, catalog, prune=False))
pruned = list(enumerate_type_guesses(classes, catalog))
print("all profiles:")
for g in full:
    y = g.profile(catalog)
    verdict = "feasible" if lp_feasible(slot_lp(inst, classes, y)) else "infeasible"
    print(f"  {y}  LP {verdict}")

# two machines whose vectors agree in parity can be averaged, so only the
# profile without such a pair needs checking
print("after parity pruning:", [g.profile(catalog) for g in pruned])

sol = solve_slot_milp_exact(inst, classes)
print("exact solver picks", sol.y)
for i in range(inst.m):
    print(f"  machine {i}:", {j: str(v) for j, v in sorted(sol.x.rows[i].items())})

# an integral solution exists here, so the relaxation must be feasible too,
# and the DP (which may use slack) must agree
print("brute force:", brute_force_target(inst))
print("DP feasible:", bool(solve_slot_milp_dp(inst, classes, Fraction(1, inst.n))))

# three jobs of size 3 cannot give two machines loads in [4, 5]
tight = Instance.uniform([3, 3, 3], 2, 4, 5)
print("[3,3,3] on [4,5]:", bool(solve_slot_milp_exact(tight, classify_jobs(tight, 1))))
