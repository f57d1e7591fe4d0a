"""Randomized checks of the metrics and commutator identities.

Each check returns ``(cases, failures)``; everything is exact, so a single
failure is a bug.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from . import chabauty
from ._rng import stream
from .brute import valid_triplets
from .perm_module import LaurentIdeal
from .perm_stability import Permutation, hamming
from .wreath import GoursatTriplet, WreathGroup


def _random_perm(rng, n):
    return Permutation(rng.permutation(n))


def check_hamming(rng, cases=500, n=64):
    """Metric axioms and bi-invariance: exhaustive on S(4), random on S(n)."""
    fails = 0
    checked = 0
    S4 = [Permutation(p) for p in itertools.permutations(range(4))]
    for a, b in itertools.product(S4, repeat=2):
        d = hamming(a, b)
        if d != hamming(b, a) or (d == 0) != (a == b) or not 0 <= d <= 1:
            fails += 1
        checked += 1
    for a, b, c in itertools.product(S4, repeat=3):
        if hamming(a, c) > hamming(a, b) + hamming(b, c):
            fails += 1
        if hamming(c * a, c * b) != hamming(a, b) or hamming(a * c, b * c) != hamming(a, b):
            fails += 1
        checked += 1
    for _ in range(cases):
        a, b, c, p, r = (_random_perm(rng, n) for _ in range(5))
        d = hamming(a, b)
        if d != hamming(b, a) or hamming(a, a) != 0 or hamming(a, c) > d + hamming(b, c):
            fails += 1
        if hamming(p * a * r, p * b * r) != d:
            fails += 1
        if d != 1 - Fraction((a.inverse() * b).fixed_points(), n):
            fails += 1
        checked += 1
    return checked, fails


def _random_element(rng, G, radius=3, support=4):
    M = G.module
    q = tuple(int(x) for x in rng.integers(-radius, radius + 1, size=G.Q.rank))
    pts = []
    for _ in range(int(rng.integers(0, support + 1))):
        c = tuple(int(x) for x in rng.integers(-radius, radius + 1, size=G.Q.rank))
        pts.append((G.X.point(0, c), tuple(int(x) for x in rng.integers(0, 5, size=G.B.rank))))
    return G.element(q, M.element(pts) if pts else M.zero())


def check_commutators(rng, cases=500, G=None):
    """``[xy,z] = [x,z]^y [y,z]``, ``[x,yz] = [x,z][x,y]^z`` and
    ``[qn, rm] = [q,m] - [r,n]`` (written additively in N)."""
    G = G or WreathGroup.lamplighter(2)
    M = G.module
    fails = 0
    for _ in range(cases):
        x, y, z = (_random_element(rng, G) for _ in range(3))
        c = G.commutator
        if c(G.multiply(x, y), z) != G.multiply(G.conjugate(c(x, z), y), c(y, z)):
            fails += 1
        if c(x, G.multiply(y, z)) != G.multiply(c(x, z), G.conjugate(c(x, y), z)):
            fails += 1
        g, h = _random_element(rng, G), _random_element(rng, G)
        q, n, r, m = g.q, g.n, h.q, h.n
        lhs = c(g, h)
        qm = c(G.lift(q), G.from_module(m))
        rn = c(G.lift(r), G.from_module(n))
        if any(lhs.q) or lhs.n != M.sub(qm.n, rn.n):
            fails += 1
        # [q̂, m] = m - m^q
        if qm.n != M.sub(m, M.act(q, m)):
            fails += 1
    return cases, fails


def _random_measure(rng, atoms):
    k = int(rng.integers(1, 4))
    picks = [atoms[int(j)] for j in rng.integers(0, len(atoms), size=k)]
    weights = [int(w) for w in rng.integers(1, 6, size=k)]
    return chabauty.EmpiricalMeasure.from_counts(list(zip(picks, weights)))


def check_d_prob(rng, cases=500, depth=128):
    """Metric axioms of the truncated probability metric on random finite
    combinations of point masses at subgroups of ``Z/2 wr Z/3``."""
    G = WreathGroup.finite_lamplighter(3)
    atoms, _ = valid_triplets(G)
    enum = chabauty.Enumeration(G)
    fails = 0
    for _ in range(cases):
        mu, nu, rho = (_random_measure(rng, atoms) for _ in range(3))
        a = chabauty.d_prob(mu, nu, depth, enum)
        b = chabauty.d_prob(nu, rho, depth, enum)
        c = chabauty.d_prob(mu, rho, depth, enum)
        if a != chabauty.d_prob(nu, mu, depth, enum) or chabauty.d_prob(mu, mu, depth, enum) != 0:
            fails += 1
        if c > a + b or a < 0 or a > 1:
            fails += 1
    return cases, fails


def check_d_prob_lamplighter(rng, cases=100, depth=128):
    """Same axioms for point masses at lamplighter ideals."""
    G = WreathGroup.lamplighter(2)
    M = G.module
    polys = [(1, 1), (1, 0, 1), (1, 1, 1), (1, 1, 0, 1), (1,), (0, 1, 1)]
    atoms = [GoursatTriplet(G, None, LaurentIdeal.generated_by(M, [p]), []) for p in polys]
    enum = chabauty.Enumeration(G)
    fails = 0
    for _ in range(cases):
        mu, nu, rho = (_random_measure(rng, atoms) for _ in range(3))
        a = chabauty.d_prob(mu, nu, depth, enum)
        b = chabauty.d_prob(nu, rho, depth, enum)
        c = chabauty.d_prob(mu, rho, depth, enum)
        if a != chabauty.d_prob(nu, mu, depth, enum) or c > a + b:
            fails += 1
    return cases, fails


def run_selftest(seed=0, cases=500):
    out = {}
    out["hamming"] = check_hamming(stream(seed, 0, "hamming"), cases)
    out["commutators"] = check_commutators(stream(seed, 0, "commutators"), cases)
    out["d_prob"] = check_d_prob(stream(seed, 0, "d_prob"), cases)
    out["d_prob_lamplighter"] = check_d_prob_lamplighter(stream(seed, 0, "d_prob_l"),
                                                         max(cases // 5, 1))
    return out
