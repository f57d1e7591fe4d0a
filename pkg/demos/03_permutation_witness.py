"""
Lamplighter relations in a symmetric group
==========================================

The finite quotient Z/2 wr Z/4 acts on itself, giving two permutations b and
t of 64 points that satisfy every relation [b, b^(t^j)] exactly.  Moving t
by one transposition breaks that, but only by a controlled amount: each
relation moves at most (occurrences of t) x (distance moved) of the points.
"""

from cosofic.perm_stability import stability_demo

rep = stability_demo(k=4, j_max=12, perturbations=1, seed=0)
print("degree", rep["n"], "swapped", rep["swaps"])
print("distance of t from its perturbation:", rep["distances"]["t"])

print(" j  exact  perturbed  bound")
for r in rep["rows"]:
    print(f"{r['j']:>2}  {str(r['exact_defect']):>5}  {str(r['perturbed_defect']):>9}  "
          f"{str(r['lipschitz_bound']):>5}")

# Perturbing b instead hurts fewer relations, since b occurs fewer times.
rep_b = stability_demo(k=4, j_max=12, perturbations=1, seed=0, target="b")
print("max defect after moving b:", rep_b["perturbed_max_defect"])
