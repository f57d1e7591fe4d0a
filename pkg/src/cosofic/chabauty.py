"""Enumerations, truncated Chabauty/probability metrics and the p_i statistic.

All exact quantities are ``fractions.Fraction``.  Monte Carlo estimates carry
a binomial standard error and the labelled seed stream they were drawn from.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from math import lcm, sqrt
from typing import Callable, NamedTuple, Sequence

from .fg_abelian import ball, box_range, seminorm
from .perm_module import window
from .wreath import GoursatTriplet, GroupElement, TransversalSpec, WreathGroup


# ----------------------------------------------------------------------------
# enumeration of G


class Enumeration:
    """Radius-lexicographic enumeration ``g_1, g_2, ...`` of G.

    Radius r holds the elements with ``||q|| <= r``, support inside the window
    of the Q-ball of radius r, and B-values of seminorm at most r.  Elements
    new at radius r are listed in lexicographic order of ``(q, n)``.
    """

    def __init__(self, G: WreathGroup, max_batch=2_000_000):
        self.G = G
        self.max_batch = max_batch
        self._items = []
        self._radius = -1
        self._windows = []

    def _window(self, r):
        while len(self._windows) <= r:
            k = len(self._windows)
            self._windows.append(set(window(ball(self.G.Q, k), self.G.X)))
        return self._windows[r]

    def _values(self, r):
        B = self.G.B
        ranges = [range(-r, r + 1)] * B.free_rank + [range(m) for m in B.torsion_moduli]
        return [tuple(v) for v in itertools.product(*ranges)]

    def _grow(self):
        r = self._radius + 1
        G, M, Q = self.G, self.G.module, self.G.Q
        pts = sorted(self._window(r))
        prev_pts = self._window(r - 1) if r else set()
        vals = self._values(r)
        zero = G.B.zero()
        if len(ball(Q, r)) * len(vals) ** len(pts) > self.max_batch:
            raise MemoryError(f"enumeration radius {r} exceeds the batch bound")
        batch = []
        for q in ball(Q, r):
            old_q = r > 0 and seminorm(Q, q) <= r - 1
            for choice in itertools.product(vals, repeat=len(pts)):
                if old_q:
                    inside = all(v == zero or (x in prev_pts and M.seminorm([(x, v)]) <= r - 1)
                                 for x, v in zip(pts, choice))
                    if inside:
                        continue
                batch.append(GroupElement(q, M.element([(x, v) for x, v in zip(pts, choice)
                                                        if v != zero])))
        batch.sort()
        self._items.extend(batch)
        self._radius = r

    def first(self, count):
        while len(self._items) < count:
            self._grow()
        return self._items[:count]

    def __getitem__(self, i):
        """1-based access ``g_i``."""
        return self.first(i)[i - 1]


class PairEnumeration:
    """All disjoint pairs ``(A, B)`` of subsets of ``{g_1..g_m}``, m = 1, 2, ...

    A pair is a ternary code over ``g_1..g_m`` (0 absent, 1 in A, 2 in B).
    Block m lists the codes that use ``g_m`` (block 1 also lists the empty
    pair) in increasing numeric value, ``g_1`` being the least significant
    digit.
    """

    @staticmethod
    def codes(count):
        out = []
        m = 0
        while len(out) < count:
            m += 1
            lo = 0 if m == 1 else 3 ** (m - 1)
            for value in range(lo, 3 ** m):
                out.append(_digits(value, m))
                if len(out) == count:
                    break
        return out

    @staticmethod
    def pairs(count):
        """Index pairs (0-based indices into the enumeration)."""
        out = []
        for code in PairEnumeration.codes(count):
            A = tuple(j for j, c in enumerate(code) if c == 1)
            B = tuple(j for j, c in enumerate(code) if c == 2)
            out.append((A, B))
        return out

    @staticmethod
    def elements_needed(count):
        m, total = 0, 0
        while total < count:
            m += 1
            total = 3 ** m
        return m


def _digits(value, m):
    out = []
    for _ in range(m):
        out.append(value % 3)
        value //= 3
    return tuple(out)


def d_pow(A: Callable, B: Callable, depth: int, enumeration: Enumeration) -> Fraction:
    """Truncated ``sum_n 1_{A △ B}(g_n) / 2^n`` over ``n <= depth``."""
    if depth < 1:
        raise ValueError("depth must be positive")
    total = Fraction(0)
    for n, g in enumerate(enumeration.first(depth), start=1):
        if bool(A(g)) != bool(B(g)):
            total += Fraction(1, 2 ** n)
    return total


# ----------------------------------------------------------------------------
# measures on Sub(G)


class EmpiricalMeasure:
    """Finitely supported measure on canonical subgroup descriptors."""

    def __init__(self, atoms: dict, estimated=False):
        # atoms: key -> (object, weight)
        self.atoms = dict(atoms)
        self.estimated = estimated
        self._member = {}
        if self.atoms and sum(w for _, w in self.atoms.values()) != 1:
            raise ValueError("weights must sum to 1")

    @classmethod
    def point_mass(cls, H):
        return cls({H.key(): (H, Fraction(1))})

    @classmethod
    def from_counts(cls, objects_with_counts, estimated=False):
        acc = {}
        total = 0
        for obj, c in objects_with_counts:
            k = obj.key()
            prev = acc.get(k)
            acc[k] = (obj, (prev[1] if prev else 0) + c)
            total += c
        return cls({k: (o, Fraction(c, total)) for k, (o, c) in acc.items()}, estimated)

    def _contains(self, key, H, g):
        hit = self._member.get((key, g))
        if hit is None:
            hit = self._member[(key, g)] = H.contains(g)
        return hit

    def mass(self, A: Sequence, B: Sequence) -> Fraction:
        total = Fraction(0)
        for k, (H, w) in self.atoms.items():
            if (all(self._contains(k, H, a) for a in A)
                    and not any(self._contains(k, H, b) for b in B)):
                total += w
        return total

    def weights(self):
        return {k: w for k, (_, w) in self.atoms.items()}

    def pattern_weights(self, elems):
        """``[(membership tuple over elems, weight)]`` per atom."""
        return [(tuple(H.contains(g) for g in elems), w) for H, w in self.atoms.values()]

    def __eq__(self, other):
        return isinstance(other, EmpiricalMeasure) and self.weights() == other.weights()

    def __len__(self):
        return len(self.atoms)


def empirical_measure(F, H: GoursatTriplet, G: WreathGroup = None) -> EmpiricalMeasure:
    """``F * H``: the average of point masses at ``f H f^-1`` over f in F."""
    G = G or H.G
    elements = F.elements() if isinstance(F, TransversalSpec) else F
    counts = Counter()
    objs = {}
    for f in elements:
        C = H.conjugate(G.inverse(f))
        k = C.key()
        counts[k] += 1
        objs.setdefault(k, C)
    return EmpiricalMeasure.from_counts([(objs[k], c) for k, c in counts.items()])


def e_ab_mass(mu, A, B) -> Fraction:
    return mu.mass(A, B)


class PatternMeasure:
    """``F * H`` seen through membership patterns of tracked elements.

    For every f the tuple ``(1[g^f in H])_g`` over the tracked elements is
    recorded; ``mass(A, B)`` only needs these patterns because
    ``g in f H f^-1`` iff ``g^f in H``.
    """

    def __init__(self, tracked, counts: Counter, total: int, estimated=False):
        self.tracked = tuple(tracked)
        self.pos = {g: j for j, g in enumerate(self.tracked)}
        self.counts = counts
        self.total = total
        self.estimated = estimated

    def mass(self, A, B) -> Fraction:
        ia = [self.pos[a] for a in A]
        ib = [self.pos[b] for b in B]
        hits = sum(c for pat, c in self.counts.items()
                   if all(pat[j] for j in ia) and not any(pat[j] for j in ib))
        return Fraction(hits, self.total)

    def pattern_weights(self, elems):
        idx = [self.pos[g] for g in elems]
        acc = Counter()
        for pat, c in self.counts.items():
            acc[tuple(pat[j] for j in idx)] += c
        return [(pat, Fraction(c, self.total)) for pat, c in acc.items()]


def membership_patterns(weighted_fs, H: GoursatTriplet, tracked):
    """Counter of membership patterns over ``[(f, multiplicity)]``.

    Uses that ``g^f`` only depends on f's Q-part when g lies in N, and that
    ``g^f`` is outside H when ``q(g)`` is outside ``Q_H``.
    """
    live = [H.Q_H.contains(g.q) for g in tracked]
    in_N = [not any(g.q) for g in tracked]
    cache = {}
    counts = Counter()
    for f, mult in weighted_fs:
        bits = []
        for j, g in enumerate(tracked):
            if not live[j]:
                bits.append(False)
            elif in_N[j]:
                key = (j, f.q)
                hit = cache.get(key)
                if hit is None:
                    hit = cache[key] = H.conjugate_membership(g, f)
                bits.append(hit)
            else:
                bits.append(H.conjugate_membership(g, f))
        counts[tuple(bits)] += mult
    return counts


def pattern_measure(fs, H, tracked, estimated=False, weighted=False):
    """``F * H`` as a :class:`PatternMeasure`; ``fs`` may be ``[(f, count)]`` if weighted."""
    pairs = list(fs) if weighted else [(f, 1) for f in fs]
    total = sum(c for _, c in pairs)
    return PatternMeasure(tracked, membership_patterns(pairs, H, tracked), total, estimated)


def d_prob(mu, nu, depth: int, enumeration: Enumeration) -> Fraction:
    """Truncated ``sum_i |mu(E_{A_i,B_i}) - nu(E_{A_i,B_i})| / 2^i``."""
    if depth < 1:
        raise ValueError("depth must be positive")
    m = PairEnumeration.elements_needed(depth)
    elems = enumeration.first(m)
    pw = [mu.pattern_weights(elems), nu.pattern_weights(elems)]
    # integer weights over a common denominator
    L = 1
    for side in pw:
        for _, w in side:
            L = lcm(L, w.denominator)
    pw = [[(sum(1 << j for j, b in enumerate(pat) if b), int(w * L)) for pat, w in side]
          for side in pw]
    total = 0
    for i, (A, B) in enumerate(PairEnumeration.pairs(depth), start=1):
        a_mask = sum(1 << j for j in A)
        b_mask = sum(1 << j for j in B)
        masses = [sum(w for bits, w in side if bits & a_mask == a_mask and not bits & b_mask)
                  for side in pw]
        total += abs(masses[0] - masses[1]) << (depth - i)
    return Fraction(total, L << depth)


def restrict_measure(mu: EmpiricalMeasure) -> EmpiricalMeasure:
    """Push ``H -> N_H = H ∩ N``."""
    acc = {}
    for H, w in mu.atoms.values():
        k = H.N_H.key()
        prev = acc.get(k)
        acc[k] = (H.N_H, (prev[1] if prev else 0) + w)
    return EmpiricalMeasure(acc, mu.estimated)


def pushforward_to_Q(mu: EmpiricalMeasure) -> EmpiricalMeasure:
    """Push ``H -> Q_H`` (the image of H in Q)."""
    acc = {}
    for H, w in mu.atoms.values():
        k = H.Q_H.lattice
        prev = acc.get(k)
        acc[k] = (H.Q_H, (prev[1] if prev else 0) + w)
    return EmpiricalMeasure(acc, mu.estimated)


# ----------------------------------------------------------------------------
# p_i(g)


class MCEstimate(NamedTuple):
    mean: Fraction
    stderr: float
    samples: int
    seed: int


def _binomial_stderr(hits, n):
    p = hits / n
    return sqrt(p * (1 - p) / n)


def p_statistic(g, K: GoursatTriplet, H: GoursatTriplet, F: TransversalSpec,
                mode="exact", samples=0, rng=None, seed=0):
    """Fraction of ``f in F`` with ``g^f in K △ H``.

    ``mode="exact"`` iterates F (returns a Fraction); ``mode="mc"`` draws
    ``samples`` independent uniform f (returns an :class:`MCEstimate`).
    """
    live = (K.Q_H.contains(g.q) or H.Q_H.contains(g.q)) and K != H
    in_N = not any(g.q)

    def differs(f):
        return K.conjugate_membership(g, f) != H.conjugate_membership(g, f)

    if mode == "exact":
        if not live:
            return Fraction(0)
        if in_N:
            # g^f depends on f only through its Q-part
            rep = F.G.module.zero()
            hits = sum(differs(GroupElement(r, rep)) for r in F.I) * F.T_size()
            return Fraction(hits, F.size())
        hits = sum(differs(f) for f in F.elements())
        return Fraction(hits, F.size())
    if mode != "mc":
        raise ValueError(f"unknown mode {mode!r}")
    if samples < 1 or rng is None:
        raise ValueError("Monte Carlo mode needs samples >= 1 and a generator")
    r_idx, vals = F.sample_coordinates(rng, samples)
    if not live:
        return MCEstimate(Fraction(0), 0.0, samples, seed)
    if in_N:
        rep = F.G.module.zero()
        per_r = {}
        hits = 0
        for r in r_idx:
            r = int(r)
            if r not in per_r:
                per_r[r] = differs(GroupElement(F.I[r], rep))
            hits += per_r[r]
    else:
        rows = Counter((int(r),) + tuple(row) for r, row in zip(r_idx, vals))
        hits = 0
        for key, c in rows.items():
            if differs(F.element_from_coordinates(key[0], key[1:])):
                hits += c
    return MCEstimate(Fraction(hits, samples), _binomial_stderr(hits, samples), samples, seed)


# ----------------------------------------------------------------------------
# Folner, centered, adapted, tempered


def _box_overlap(e, b):
    """``|R ∩ (R - b)|`` for ``R = box_range(e)``."""
    return max(0, e - abs(b))


def folner_defect(F, g, G: WreathGroup = None) -> Fraction:
    """``|gF △ F| / |F|``.

    For a :class:`TransversalSpec` ``F = Î·E^Z`` this is counted
    combinatorially: ``g(r, m) = (q + r, n^r + m)`` stays in F iff ``q + r``
    is in I, ``n^r`` is supported in Z and every coordinate stays in the box.
    """
    if isinstance(F, TransversalSpec) and F.explicit_T is None:
        G = F.G
        M, Q = G.module, G.Q
        Iset = set(F.I)
        zs = set(F.Z)
        d = G.B.free_rank
        torsion_factor = G.B.torsion_order
        per_point_full = F.E_size
        inside = 0
        for r in F.I:
            if Q.add(g.q, r) not in Iset:
                continue
            shifted = M.act(r, g.n)
            if any(x not in zs for x, _ in shifted):
                continue
            vals = dict(shifted)
            count = 1
            for x in F.Z:
                v = vals.get(x)
                if v is None:
                    count *= per_point_full
                    continue
                c = torsion_factor
                for b in v[:d]:
                    c *= _box_overlap(F.e, b)
                count *= c
            inside += count
        total = F.size()
        return Fraction(2 * (total - inside), total)
    G = G or F.G
    Fset = set(F.elements()) if isinstance(F, TransversalSpec) else set(F)
    moved = {G.multiply(g, f) for f in Fset}
    return Fraction(len(moved ^ Fset), len(Fset))


def centered_count(k: int, r: int) -> int:
    """``|{q in box(Z,k) : r - q in box(Z,k)}|``."""
    R = box_range(k)
    lo, hi = R.start, R.stop - 1
    return max(0, min(hi, r - lo) - max(lo, r - hi) + 1)


def centered_defect(Q, k: int, r) -> Fraction:
    """``1 - |{q in I : r in q + I}| / |I|`` for ``I = box(Q, k)``, in closed form."""
    count = 1
    total = 1
    for c in r[:Q.free_rank]:
        count *= centered_count(k, c)
        total *= k
    return 1 - Fraction(count, total)


def centered_defect_explicit(I, r, Q) -> Fraction:
    """Same quantity by exhaustive count over an explicit finite set."""
    Iset = set(I)
    hits = sum(1 for q in Iset if Q.sub(r, q) in Iset)
    return 1 - Fraction(hits, len(Iset))


def adapted_statistic(T, I, g, Phi, G: WreathGroup) -> Fraction:
    """``|{b in I : [g, b̂] + Phi ⊂ T}| / |I|``; T is a TransversalSpec or a predicate."""
    in_T = T.in_T if isinstance(T, TransversalSpec) else T
    M = G.module
    I = list(I)
    hits = 0
    for b in I:
        c = G.commutator(g, G.lift(b)).n
        if all(in_T(M.add(c, phi)) for phi in Phi):
            hits += 1
    return Fraction(hits, len(I))


def tempered_ratio(sets: Sequence, multiply, inverse) -> Fraction:
    """``|∪_{j<i} F_j^-1 F_i| / |F_i|`` for the prefix ``F_1..F_i``."""
    *prev, last = [list(s) for s in sets]
    union = set()
    for Fj in prev:
        inv = [inverse(a) for a in Fj]
        for a in inv:
            for b in last:
                union.add(multiply(a, b))
    return Fraction(len(union), len(set(last)))
