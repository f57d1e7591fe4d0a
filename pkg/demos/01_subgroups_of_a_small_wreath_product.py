"""
Subgroups of Z/2 wr Z/k as triplets
===================================

Every subgroup of a split extension Q ⋉ N is pinned down by three pieces of
data: its image in Q, its intersection with N, and a way of lifting the
image back.  For the small groups Z/2 wr Z/k we can list all subgroups by
brute force (as permutation groups) and compare with the triplets that
pass the validation checks.
"""

from cosofic import brute
from cosofic.wreath import WreathGroup

for k in (1, 2, 3):
    rep = brute.goursat_audit(k)
    print(f"k = {k}: |G| = {rep['order']:>2}, {rep['subgroups']:>2} subgroups, "
          f"{rep['triplets']:>2} valid triplets, {rep['rejected_candidates']:>3} candidates "
          f"rejected, agree = {rep['ok']}")

# The rejected candidates are triplets whose lift data is inconsistent, for
# instance a lift whose square leaves N_H.  validate() names the failed check.
G = WreathGroup.finite_lamplighter(2)
for T in brute.candidate_triplets(G):
    problems = T.validate()
    if problems:
        print("rejected:", T, "->", problems)
        break
triplets, _ = brute.valid_triplets(G)
for H in triplets[:3]:
    print("valid:", H, "index", H.index())

# The same bookkeeping also gives conjugacy classes.  A finite-index K is
# spread uniformly over its conjugacy class by any transversal of its
# normalizer.
rep = brute.transversal_audit(3)
print(f"{rep['transversals_checked']} transversals checked, all uniform: {rep['ok']}")
