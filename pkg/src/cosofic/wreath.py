"""The split group ``G = Q ⋉ B^X`` and its subgroups as Goursat triplets.

Conventions (all checked against plain multiplication in the tests):

* ``(q1, n1)(q2, n2) = (q1 + q2, n1^q2 + n2)``
* ``x^y = y^-1 x y`` and ``[x, y] = x^-1 y^-1 x y``, so that ``x^y = x [x, y]``
* a subgroup H is ``(Q_H, N_H, {(g_j, a_j)})`` with ``H = <(g_j, a_j)> N_H``
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from math import factorial
from typing import NamedTuple, Sequence

from .fg_abelian import (INFINITE, AbelianSubgroup, FgAbelianGroup, box_range,
                         index_product, relations_of, solve_in_generators)
from .perm_module import (FiniteX, LaurentIdeal, ModuleElement, PermModule, Pullback,
                          QSet, Submodule, UnsupportedSubmodule, submodule_from_json)


class GroupElement(NamedTuple):
    q: tuple
    n: ModuleElement


@dataclass(frozen=True)
class WreathGroup:
    Q: FgAbelianGroup
    B: FgAbelianGroup
    X: QSet

    def __post_init__(self):
        if self.X.Q != self.Q:
            raise ValueError("X must be a Q-set")

    @cached_property
    def module(self):
        return PermModule(self.X, self.B)

    @classmethod
    def lamplighter(cls, p=2):
        Z = FgAbelianGroup(1, (), ("t",))
        return cls(Z, FgAbelianGroup(0, (p,)), QSet.regular(Z))

    @classmethod
    def finite_lamplighter(cls, k, p=2):
        """``Z/p wr Z/k`` with the regular action (k = 1 gives Z/p)."""
        Q = FgAbelianGroup(0, (k,) if k > 1 else ())
        return cls(Q, FgAbelianGroup(0, (p,)), QSet.regular(Q))

    @property
    def is_finite(self):
        return self.Q.is_finite and self.X.is_finite and self.B.is_finite

    def order(self):
        if not self.is_finite:
            return INFINITE
        return self.Q.order * self.B.order ** self.X.size()

    def identity(self):
        return GroupElement(self.Q.zero(), ModuleElement())

    def element(self, q, n=None):
        return GroupElement(self.Q.reduce(q), n if n is not None else ModuleElement())

    def lift(self, q):
        """The split lift ``q̂ = (q, 0)``."""
        return self.element(q)

    def from_module(self, n):
        return GroupElement(self.Q.zero(), n)

    def multiply(self, g1, g2):
        M = self.module
        return GroupElement(self.Q.add(g1.q, g2.q), M.add(M.act(g2.q, g1.n), g2.n))

    def inverse(self, g):
        M = self.module
        mq = self.Q.neg(g.q)
        return GroupElement(mq, M.neg(M.act(mq, g.n)))

    def power(self, g, k):
        if k < 0:
            g, k = self.inverse(g), -k
        out = self.identity()
        while k:
            if k & 1:
                out = self.multiply(out, g)
            g = self.multiply(g, g)
            k >>= 1
        return out

    def conjugate(self, g, f):
        """``g^f = f^-1 g f``."""
        return self.multiply(self.multiply(self.inverse(f), g), f)

    def commutator(self, g, f):
        """``[g, f] = g^-1 f^-1 g f``."""
        return self.multiply(self.multiply(self.inverse(g), self.inverse(f)),
                             self.multiply(g, f))

    def product(self, elements):
        out = self.identity()
        for g in elements:
            out = self.multiply(out, g)
        return out

    def elements(self):
        """All elements of a finite group in a fixed order."""
        if not self.is_finite:
            raise ValueError("group is infinite")
        pts = self.X.points()
        Bvals = self.B.elements()
        M = self.module
        out = []
        for q in self.Q.elements():
            for vals in itertools.product(Bvals, repeat=len(pts)):
                out.append(GroupElement(q, M.element(list(zip(pts, vals)))))
        return out

    def to_json(self):
        return {"Q": self.Q.to_json(), "B": self.B.to_json(), "X": self.X.to_json()}

    @classmethod
    def from_json(cls, data):
        Q = FgAbelianGroup.from_json(data["Q"])
        B = FgAbelianGroup.from_json(data["B"])
        X = QSet.from_json(Q, data.get("X", {"stabilizers": [[]]}))
        return cls(Q, B, X)

    def element_from_json(self, data):
        return self.element(tuple(data.get("q", self.Q.zero())),
                            self.module.from_json(data.get("n", [])))


def multiply(G, g1, g2):
    return G.multiply(g1, g2)


def inverse(G, g):
    return G.inverse(g)


def commutator(G, g, f):
    return G.commutator(g, f)


def accumulate(G: WreathGroup, lifts: Sequence[GroupElement], coeffs: Sequence[int]):
    """``prod_j lifts_j^{c_j}`` in generator order."""
    out = G.identity()
    for g, c in zip(lifts, coeffs):
        if c:
            out = G.multiply(out, G.power(g, c))
    return out


class GoursatTriplet:
    """A subgroup ``H <= G`` as ``(Q_H, N_H, alpha)``.

    ``alpha`` is a list of generating lifts ``(g_j, a_j)`` with ``(g_j, a_j)``
    in H and the ``g_j`` generating ``Q_H``.  The lifts are stored exactly as
    given (so approximations can share them); canonical keys use the HNF
    generators of ``Q_H`` and reduce their lifts modulo ``N_H``.
    """

    def __init__(self, G: WreathGroup, Q_H, N_H: Submodule, alpha=None):
        self.G = G
        if isinstance(alpha, dict):
            pairs = list(alpha.items())
        else:
            pairs = list(alpha or [])
        pairs = [(G.Q.reduce(q), a) for q, a in pairs]
        generated = AbelianSubgroup.generated_by(G.Q, [q for q, _ in pairs])
        if Q_H is None:
            Q_H = generated
        elif generated != Q_H:
            raise ValueError(f"cocycle data generates {generated.generators()}, "
                             f"not Q_H = {Q_H.generators()}")
        self.Q_H = Q_H
        self.N_H = N_H
        self.gens = tuple(q for q, _ in pairs)
        self.a = tuple(a for _, a in pairs)
        self.lifts = tuple(GroupElement(q, a) for q, a in pairs)
        self._aq = {}
        self._key = None

    @classmethod
    def from_generators(cls, G, pairs, N_H):
        """Build from arbitrary generating lifts ``[(q, a), ...]``."""
        return cls(G, None, N_H, pairs)

    # -- core queries -----------------------------------------------------
    def a_q(self, q):
        """A lift ``a`` with ``(q, a) in H`` for ``q in Q_H``, accumulated from the generators."""
        q = self.G.Q.reduce(q)
        hit = self._aq.get(q)
        if hit is None:
            if not self.gens:
                if any(q):
                    raise ValueError(f"{q} is not in Q_H")
                c = ()
            else:
                c = solve_in_generators(self.Q_H, self.gens, q)
            hit = accumulate(self.G, self.lifts, c).n
            self._aq[q] = hit
        return hit

    def contains(self, g) -> bool:
        if not self.Q_H.contains(g.q):
            return False
        return self.N_H.contains(self.G.module.sub(g.n, self.a_q(g.q)))

    __contains__ = contains

    def index(self):
        return index_product(self.Q_H.index(), self.N_H.index())

    def key(self):
        if self._key is None:
            self._key = (self.Q_H.lattice, self.N_H.key(),
                         tuple(self.N_H.reduce(self.a_q(g)) for g in self.Q_H.generators()))
        return self._key

    def __eq__(self, other):
        return isinstance(other, GoursatTriplet) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        al = ", ".join(f"{g}:{self.N_H.reduce(self.a_q(g))}" for g in self.Q_H.generators())
        return f"GoursatTriplet(Q_H={self.Q_H.generators()}, N_H={self.N_H!r}, alpha=[{al}])"

    # -- checks -------------------------------------------------------------
    def validate(self) -> list:
        G, M, N = self.G, self.G.module, self.N_H
        problems = []
        for g in self.gens:
            if not N.invariant(g):
                problems.append(f"N_H is not invariant under generator {g}")
        for j, k in itertools.combinations(range(len(self.gens)), 2):
            x = G.multiply(self.lifts[j], self.lifts[k])
            y = G.multiply(self.lifts[k], self.lifts[j])
            if not N.contains(M.sub(x.n, y.n)):
                problems.append(f"generators {self.gens[j]} and {self.gens[k]} fail the "
                                f"commutation cocycle")
        for rel in relations_of(G.Q, self.gens):
            w = accumulate(G, self.lifts, rel)
            if any(w.q) or not N.contains(w.n):
                problems.append(f"relation {tuple(rel)} lands outside N_H")
        return problems

    def is_valid(self):
        return not self.validate()

    # -- derived subgroups ---------------------------------------------------
    def conjugate(self, g):
        """``H^g = g^-1 H g``."""
        G = self.G
        N = self.N_H.act(g.q)
        alpha = [(lift.q, G.conjugate(lift, g).n) for lift in self.lifts]
        return GoursatTriplet(G, self.Q_H, N, alpha)

    def conjugate_membership(self, g, f) -> bool:
        """Is ``g^f`` in H?  Uses ``g^f = g [g, f]`` with ``[g, f]`` in N."""
        if not self.Q_H.contains(g.q):
            return False
        M = self.G.module
        # [qn, rm] = (m - m^q) - (n - n^r)
        c = M.sub(M.sub(f.n, M.act(g.q, f.n)), M.sub(g.n, M.act(f.q, g.n)))
        return self.N_H.contains(M.add(c, M.sub(g.n, self.a_q(g.q))))

    def normalizer_in_N(self) -> Submodule:
        """``N_N(H) = ∩_j {m : m - m^{g_j} in N_H}``."""
        out = None
        for g in self.gens:
            piece = self.N_H.diff_preimage(g)
            out = piece if out is None else out.intersect(piece)
        return out if out is not None else full_submodule_like(self.N_H)

    def to_json(self):
        M = self.G.module
        return {"Q_H": self.Q_H.to_json(), "N_H": self.N_H.to_json(),
                "alpha": [{"gen": list(g), "a": M.to_json(a)} for g, a in zip(self.gens, self.a)]}

    @classmethod
    def from_json(cls, G, data):
        M = G.module
        N_H = submodule_from_json(M, data["N_H"])
        pairs = [(tuple(d["gen"]), M.from_json(d.get("a", []))) for d in data.get("alpha", [])]
        listed = {G.Q.reduce(q) for q, _ in pairs}
        for q in data.get("Q_H", []):
            if G.Q.reduce(q) not in listed:
                pairs.append((tuple(q), ModuleElement()))
        return cls.from_generators(G, pairs, N_H)


def full_submodule_like(S: Submodule) -> Submodule:
    if isinstance(S, LaurentIdeal):
        return LaurentIdeal(S.module, (1,))
    if isinstance(S, FiniteX):
        return FiniteX.full(S.module)
    if isinstance(S, Pullback):
        return Pullback(S.fmap, FiniteX.full(S.fmap.target))
    raise UnsupportedSubmodule(f"no full submodule for {type(S).__name__}")


def triplet_validate(H):
    return H.validate()


def triplet_contains(H, g):
    return H.contains(g)


def triplet_conjugate(H, g):
    return H.conjugate(g)


def triplet_index(H):
    return H.index()


def conjugate_membership(g, f, H):
    return H.conjugate_membership(g, f)


def normalizer_index_in_N(H):
    return H.normalizer_in_N().index()


def separating_subgroup(L: FiniteX, T, invariance_gens=()):
    """``L + j! B^X`` for the least j that keeps every ``t in T \\ L`` outside."""
    outside = [t for t in T if not L.contains(t)]
    full = FiniteX.full(L.module)
    j = 1
    while True:
        scaled = full.lattice.scaled(factorial(j))
        cand = FiniteX(L.module, L.lattice + scaled)
        if not any(cand.contains(t) for t in outside):
            break
        j += 1
    for q in invariance_gens:
        if not cand.invariant(q):
            raise AssertionError("separating subgroup lost invariance")
    return cand


# ----------------------------------------------------------------------------
# product transversals


class TransversalSpec:
    """``F = Î · T`` with ``T = E^Z``, ``E = box(B, e)`` (or an explicit T).

    Elements are indexed by ``(r_index, value_indices)``; the value index of a
    point selects an element of E in lexicographic order.
    """

    def __init__(self, G: WreathGroup, I, Z=(), e=1, explicit_T=None):
        self.G = G
        self.I = tuple(I)
        self.Z = tuple(Z)
        self.e = e
        self.explicit_T = None if explicit_T is None else tuple(explicit_T)
        B = G.B
        self.ranges = [box_range(e)] * B.free_rank + [range(m) for m in B.torsion_moduli]

    @property
    def E_size(self):
        out = 1
        for r in self.ranges:
            out *= _span(r)
        return out

    def T_size(self):
        if self.explicit_T is not None:
            return len(self.explicit_T)
        return self.E_size ** len(self.Z)

    def size(self):
        return len(self.I) * self.T_size()

    def E_values(self):
        return [tuple(v) for v in itertools.product(*self.ranges)]

    def T_elements(self):
        if self.explicit_T is not None:
            yield from self.explicit_T
            return
        M = self.G.module
        vals = self.E_values()
        for choice in itertools.product(vals, repeat=len(self.Z)):
            yield M.element(list(zip(self.Z, choice)))

    def elements(self):
        for r in self.I:
            for m in self.T_elements():
                yield GroupElement(r, m)

    def in_T(self, m) -> bool:
        if self.explicit_T is not None:
            return m in self.explicit_T
        zs = set(self.Z)
        d = self.G.B.free_rank
        for x, v in m:
            if x not in zs:
                return False
            if any(c not in box_range(self.e) for c in v[:d]):
                return False
        return True

    def contains(self, f) -> bool:
        return f.q in set(self.I) and self.in_T(f.n)

    def sample_coordinates(self, rng, count):
        """Independent uniform coordinates: ``(r_idx array, value matrix)``."""
        import numpy as np

        r_idx = rng.integers(0, len(self.I), size=count)
        if self.explicit_T is not None:
            return r_idx, rng.integers(0, len(self.explicit_T), size=(count, 1))
        cols = []
        for _ in self.Z:
            for rg in self.ranges:
                if _span(rg) < 2 ** 62:
                    cols.append(rng.integers(0, _span(rg), size=count).astype(object) + rg.start)
                else:
                    cols.append(np.array([rg.start + _big_uniform(rng, _span(rg))
                                          for _ in range(count)], dtype=object))
        vals = np.stack(cols, axis=1) if cols else np.zeros((count, 0), dtype=object)
        return r_idx, vals

    def element_from_coordinates(self, r_i, row):
        if self.explicit_T is not None:
            return GroupElement(self.I[int(r_i)], self.explicit_T[int(row[0])])
        nB = len(self.ranges)
        items = []
        # E-values are already reduced and Z is sorted, so the tuple is canonical
        for k, x in enumerate(self.Z):
            v = tuple(int(c) for c in row[k * nB:(k + 1) * nB])
            if any(v):
                items.append((x, v))
        return GroupElement(self.I[int(r_i)], ModuleElement(items))

    def sample(self, rng, count):
        r_idx, vals = self.sample_coordinates(rng, count)
        return [self.element_from_coordinates(r, row) for r, row in zip(r_idx, vals)]

    def sample_counts(self, rng, count):
        """Sampled elements collapsed to ``[(f, multiplicity)]`` in draw order of first hit."""
        r_idx, vals = self.sample_coordinates(rng, count)
        rows = Counter((int(r),) + tuple(int(c) for c in row) for r, row in zip(r_idx, vals))
        return [(self.element_from_coordinates(k[0], k[1:]), c) for k, c in rows.items()]


def _span(rg):
    # len() of a range overflows past sys.maxsize
    return rg.stop - rg.start


def _big_uniform(rng, n):
    """Uniform integer in ``[0, n)`` for n beyond int64, built from 62-bit limbs."""
    bits = n.bit_length() + 64
    while True:
        v = 0
        for _ in range((bits + 61) // 62):
            v = (v << 62) | int(rng.integers(0, 2 ** 62))
        limit = (1 << (62 * ((bits + 61) // 62)))
        if v < limit - limit % n:
            return v % n


def product_transversal(G, I, Z, e, H=None):
    """Build ``F = Î·E^Z``; with H given, check that I is a finite-to-one transversal of Q_H."""
    from .fg_abelian import is_finite_to_one_transversal

    spec = TransversalSpec(G, I, Z, e)
    if H is not None and H.Q_H.index() is not INFINITE:
        if is_finite_to_one_transversal(spec.I, H.Q_H) is None:
            raise ValueError("I is not a finite-to-one transversal of Q_H")
    return spec
