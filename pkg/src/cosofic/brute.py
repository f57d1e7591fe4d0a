"""Brute-force oracle for small finite wreath products ``Z/p wr Z/k``.

The group is rebuilt as a permutation group on ``Z/k x Z/p``, where
``(s, v)`` sends ``(x, c)`` to ``(x - s, c + v(x - s))``.  This uses none of
the module arithmetic.  Elements of ``WreathGroup`` are matched to
permutations by walking both groups along the generators, and the matching
is checked to be a bijective homomorphism.  Subgroups are found by closure,
and triplets by exhaustive search followed by validation.
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from fractions import Fraction

from .fg_abelian import AbelianSubgroup
from .perm_module import FiniteX
from .wreath import GoursatTriplet, WreathGroup


def audit_bound():
    return int(os.environ.get("COSOFIC_AUDIT_BOUND", 10_000))


class OversizeGroup(ValueError):
    pass


def _compose(a, b):
    """Apply a, then b."""
    return tuple(b[i] for i in a)


def _inverse(a):
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def closure(gens, identity):
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = _compose(x, s)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


class BruteWreath:
    def __init__(self, k, p=2):
        if k < 1 or p < 2:
            raise ValueError("need k >= 1 and p >= 2")
        order = k * p ** k
        if order > audit_bound():
            raise OversizeGroup(f"|G| = {order} exceeds the audit bound {audit_bound()}")
        self.k, self.p = k, p
        size = k * p
        self.identity = tuple(range(size))

        def pt(x, c):
            return (x % k) * p + (c % p)

        self.b = tuple(pt(x, c + (1 if x == 0 else 0)) for x in range(k) for c in range(p))
        self.t = tuple(pt(x - 1, c) for x in range(k) for c in range(p))
        self.elements = closure([self.b, self.t], self.identity)
        if len(self.elements) != order:
            raise AssertionError(f"closure has {len(self.elements)} elements, expected {order}")
        self.G = WreathGroup.finite_lamplighter(k, p)
        self._match()

    def _match(self):
        G, M = self.G, self.G.module
        pts = G.X.points()
        gens = [(G.from_module(M.delta(pts[0])), self.b)]
        if self.k > 1:
            gens.append((G.lift((1,)), self.t))
        to_perm = {G.identity(): self.identity}
        frontier = [G.identity()]
        while frontier:
            nxt = []
            for g in frontier:
                for wg, wp in gens:
                    h = G.multiply(g, wg)
                    if h not in to_perm:
                        to_perm[h] = _compose(to_perm[g], wp)
                        nxt.append(h)
            frontier = nxt
        if len(to_perm) != len(self.elements) or set(to_perm.values()) != set(self.elements):
            raise AssertionError("generator walk is not a bijection")
        for g, h in itertools.product(to_perm, repeat=2):
            if to_perm[G.multiply(g, h)] != _compose(to_perm[g], to_perm[h]):
                raise AssertionError("generator walk is not a homomorphism")
        self.to_perm = to_perm
        self.from_perm = {v: k for k, v in to_perm.items()}

    def subgroups(self):
        """Every subgroup, as a frozenset of permutations."""
        trivial = frozenset([self.identity])
        found = {trivial}
        frontier = [trivial]
        while frontier:
            nxt = []
            for S in frontier:
                for g in self.elements:
                    if g in S:
                        continue
                    T = closure(list(S) + [g], self.identity)
                    if T not in found:
                        found.add(T)
                        nxt.append(T)
            frontier = nxt
        return found

    def conjugate(self, S, f):
        """``f^-1 S f``."""
        fi = _inverse(f)
        return frozenset(_compose(_compose(fi, s), f) for s in S)

    def normalizer(self, S):
        return frozenset(f for f in self.elements if self.conjugate(S, f) == S)

    def left_cosets(self, S):
        """Left cosets ``fS`` in a fixed order."""
        seen, out = set(), []
        for f in sorted(self.elements):
            if f in seen:
                continue
            coset = sorted(_compose(f, s) for s in S)  # _compose(x, y) is the product x·y
            seen.update(coset)
            out.append(coset)
        return out

    def membership(self, T: GoursatTriplet):
        return frozenset(self.to_perm[g] for g in self.to_perm if T.contains(g))


def candidate_triplets(G: WreathGroup):
    """All ``(Q_H, N_H, a)`` with ``a`` ranging over B^X, before validation."""
    Q, M = G.Q, G.module
    q_subs = {}
    for q in Q.elements():
        S = AbelianSubgroup.generated_by(Q, [q])
        q_subs[S.lattice] = S
    elems = module_elements(G)
    n_subs = {}
    frontier = [FiniteX.zero(M)]
    n_subs[frontier[0].key()] = frontier[0]
    while frontier:
        nxt = []
        for N in frontier:
            for v in elems:
                if N.contains(v):
                    continue
                N2 = FiniteX.generated_by(M, N.generators() + [v])
                if N2.key() not in n_subs:
                    n_subs[N2.key()] = N2
                    nxt.append(N2)
        frontier = nxt
    for S in q_subs.values():
        gens = S.generators()
        for N in n_subs.values():
            for a in itertools.product(elems, repeat=len(gens)):
                yield GoursatTriplet(G, S, N, list(zip(gens, a)))


def module_elements(G):
    M = G.module
    pts = G.X.points()
    return [M.element(list(zip(pts, vals)))
            for vals in itertools.product(G.B.elements(), repeat=len(pts))]


def valid_triplets(G):
    out = {}
    rejected = 0
    for T in candidate_triplets(G):
        if T.validate():
            rejected += 1
            continue
        out.setdefault(T.key(), T)
    return list(out.values()), rejected


def goursat_audit(k, p=2, mutate=False):
    """Compare brute-force subgroups with validated triplets.

    With ``mutate`` the triplet membership test is corrupted on one element
    (a negative control); the audit must then report mismatches.
    """
    bw = BruteWreath(k, p)
    G = bw.G
    subs = bw.subgroups()
    triplets, rejected = valid_triplets(G)
    order = len(bw.elements)
    flip = None
    if mutate:
        flip = next(g for g in sorted(bw.to_perm, key=repr) if bw.to_perm[g] != bw.identity)

    def members(T):
        S = bw.membership(T)
        if flip is not None and T.Q_H.contains(flip.q):
            S = S ^ {bw.to_perm[flip]}
        return S

    by_set = {}
    problems = []
    for T in triplets:
        S = members(T)
        if S in by_set:
            problems.append(f"two triplets give the same subgroup: {T!r}")
        by_set[S] = T
        if S not in subs:
            problems.append(f"triplet does not give a subgroup: {T!r}")
            continue
        if T.index() * len(S) != order:
            problems.append(f"index mismatch for {T!r}")
    missing = [S for S in subs if S not in by_set]
    problems.extend(f"subgroup of order {len(S)} has no triplet" for S in missing)
    conj_checked = 0
    for S, T in by_set.items():
        if S not in subs:
            continue
        for g, f in bw.to_perm.items():
            if members(T.conjugate(g)) != bw.conjugate(S, f):
                problems.append(f"conjugate of {T!r} by {g} disagrees")
                break
            conj_checked += 1
    return {"k": k, "p": p, "order": order, "subgroups": len(subs), "triplets": len(triplets),
            "rejected_candidates": rejected, "conjugates_checked": conj_checked,
            "problems": problems, "ok": not problems}


def conjugacy_class_measure(bw: BruteWreath, S):
    cls = {bw.conjugate(S, f) for f in bw.elements}
    w = Fraction(1, len(cls))
    return {C: w for C in cls}


def transversal_audit(k=3, p=2, multiplicity_two=True):
    """``F * K`` against the uniform measure on the conjugacy class of K.

    Runs over every subgroup K and every one-to-one left transversal F of
    ``N_G(K)``; with ``multiplicity_two`` also over every transversal that
    picks two distinct elements from each coset, when there are at most
    20000 of them.  Returns counts and any mismatches.
    """
    bw = BruteWreath(k, p)
    G = bw.G
    triplets, _ = valid_triplets(G)
    checked = 0
    problems = []
    for T in triplets:
        S = bw.membership(T)
        target = conjugacy_class_measure(bw, S)
        Nrm = bw.normalizer(S)
        cosets = bw.left_cosets(Nrm)
        atom = {}
        for f in bw.elements:
            g = bw.from_perm[f]
            # f K f^-1 as a subgroup of permutations
            atom[f] = bw.membership(T.conjugate(G.inverse(g)))
        families = [itertools.product(*cosets)]
        m2 = 1
        for c in cosets:
            m2 *= len(c) * (len(c) - 1) // 2
        if multiplicity_two and 0 < m2 <= 20_000:
            pairs = [list(itertools.combinations(c, 2)) for c in cosets]
            families.append(tuple(x for pr in choice for x in pr)
                            for choice in itertools.product(*pairs))
        for fam in families:
            for F in fam:
                counts = Counter(atom[f] for f in F)
                got = {C: Fraction(c, len(F)) for C, c in counts.items()}
                if got != target:
                    problems.append(f"K of order {len(S)}: F*K is not uniform on the class")
                    break
                checked += 1
    return {"subgroups": len(triplets), "transversals_checked": checked, "problems": problems,
            "ok": not problems}
