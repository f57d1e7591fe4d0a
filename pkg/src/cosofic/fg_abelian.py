"""Finitely generated abelian groups ``Z^d + Z/m_1 + ... + Z/m_t``.

Elements are plain tuples of ints (free coordinates first, then torsion
coordinates reduced into ``[0, m_j)``).  A subgroup is stored as the HNF basis
of its preimage lattice in ``Z^(d+t)``; that lattice always contains the
relation vectors ``m_j e_(d+j)``, which makes the HNF a canonical key.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from . import _lattice

AbelianElement = tuple  # tuple[int, ...]


class Infinite:
    """Sentinel for an infinite index.  Absorbs multiplication."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Infinite"

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("Infinite")


INFINITE = Infinite()


def index_product(*values):
    out = 1
    for v in values:
        if v is INFINITE:
            return INFINITE
        out *= v
    return out


@dataclass(frozen=True)
class FgAbelianGroup:
    free_rank: int
    torsion_moduli: tuple = ()
    basis_labels: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion_moduli", tuple(int(m) for m in self.torsion_moduli))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        if any(m < 2 for m in self.torsion_moduli):
            raise ValueError(f"torsion moduli must be >= 2, got {self.torsion_moduli}")
        labels = tuple(self.basis_labels) or tuple(f"s{j}" for j in range(self.free_rank))
        if len(labels) != self.free_rank or len(set(labels)) != len(labels):
            raise ValueError("need one distinct label per free generator")
        object.__setattr__(self, "basis_labels", labels)

    @classmethod
    def invariant(cls, free_rank, torsion=(), labels=()):
        """Constructor enforcing invariant-factor order ``m_1 | m_2 | ...``."""
        torsion = tuple(torsion)
        for a, b in zip(torsion, torsion[1:]):
            if b % a:
                raise ValueError(f"torsion moduli {torsion} are not in invariant-factor order")
        return cls(free_rank, torsion, tuple(labels))

    @property
    def rank(self):
        """Number of stored coordinates, ``d + t``."""
        return self.free_rank + len(self.torsion_moduli)

    @property
    def moduli(self):
        return (0,) * self.free_rank + self.torsion_moduli

    @property
    def torsion_order(self):
        out = 1
        for m in self.torsion_moduli:
            out *= m
        return out

    @property
    def is_finite(self):
        return self.free_rank == 0

    @property
    def order(self):
        return self.torsion_order if self.is_finite else INFINITE

    def relation_rows(self):
        d, n = self.free_rank, self.rank
        return [
            tuple(m if k == d + j else 0 for k in range(n))
            for j, m in enumerate(self.torsion_moduli)
        ]

    def zero(self) -> AbelianElement:
        return (0,) * self.rank

    def reduce(self, coords: Sequence[int]) -> AbelianElement:
        if len(coords) != self.rank:
            raise ValueError(f"element {tuple(coords)} has length {len(coords)}, group rank is {self.rank}")
        if not self.torsion_moduli:
            return tuple(coords)
        d = self.free_rank
        if d == 0:
            return tuple(c % m for c, m in zip(coords, self.torsion_moduli))
        return tuple(coords[:d]) + tuple(c % m for c, m in zip(coords[d:], self.torsion_moduli))

    def add(self, a, b):
        return self.reduce([x + y for x, y in zip(a, b)])

    def sub(self, a, b):
        return self.reduce([x - y for x, y in zip(a, b)])

    def neg(self, a):
        return self.reduce([-x for x in a])

    def scale(self, k, a):
        return self.reduce([k * x for x in a])

    def generators(self):
        n = self.rank
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]

    def elements(self):
        """All elements of a finite group, lexicographic."""
        if not self.is_finite:
            raise ValueError("group is infinite")
        return list(itertools.product(*(range(m) for m in self.torsion_moduli)))

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": list(self.torsion_moduli),
                "labels": list(self.basis_labels)}

    @classmethod
    def from_json(cls, data):
        return cls.invariant(int(data.get("free_rank", 0)), tuple(data.get("torsion", ())),
                             tuple(data.get("labels", ())))


@dataclass(frozen=True)
class AbelianSubgroup:
    ambient: FgAbelianGroup
    lattice: tuple = field(default=())

    # -- construction -----------------------------------------------------
    @classmethod
    def generated_by(cls, Q: FgAbelianGroup, gens: Iterable[Sequence[int]] = ()):
        rows = [tuple(g) for g in gens]
        for g in rows:
            if len(g) != Q.rank:
                raise ValueError(f"generator {g} has wrong length for {Q}")
        rows += Q.relation_rows()
        return cls(Q, _lattice.hnf(rows, Q.rank))

    @classmethod
    def whole(cls, Q):
        return cls.generated_by(Q, Q.generators())

    @classmethod
    def trivial(cls, Q):
        return cls.generated_by(Q, ())

    # -- queries ----------------------------------------------------------
    def contains(self, q) -> bool:
        return _lattice.solve(self.lattice, tuple(q)) is not None

    __contains__ = contains

    def residue(self, q) -> AbelianElement:
        """Canonical representative of the coset ``q + S`` (lifted coordinates)."""
        return _lattice.reduce_vector(self.lattice, q)

    def index(self):
        n = self.ambient.rank
        if len(self.lattice) < n:
            return INFINITE
        out = 1
        for row, c in zip(self.lattice, _lattice.pivots(self.lattice)):
            out *= row[c]
        return out

    def index_in(self, other: "AbelianSubgroup"):
        """``[other : self]`` for ``self <= other``."""
        if not self.is_subgroup_of(other):
            raise ValueError("not a subgroup")
        a, b = self.index(), other.index()
        if a is INFINITE:
            if b is not INFINITE:
                return INFINITE
            # compare ranks; equal rank gives a finite index via determinants of a common frame
            if len(self.lattice) < len(other.lattice):
                return INFINITE
            basis = other.lattice
            coords = [_lattice.solve(basis, row) for row in self.lattice]
            diag, _, _ = _lattice.smith_with_transform(coords, len(basis))
            out = 1
            for d in diag:
                out *= d
            return out
        return a // b

    def generators(self):
        """HNF rows that are nonzero in Q, reduced: a canonical generating set."""
        Q = self.ambient
        gens = []
        for row in self.lattice:
            g = Q.reduce(row)
            if any(g):
                gens.append(g)
        return gens

    def is_subgroup_of(self, other: "AbelianSubgroup") -> bool:
        return all(other.contains(r) for r in self.lattice)

    def __add__(self, other):
        self._check(other)
        return AbelianSubgroup(self.ambient, _lattice.hnf(list(self.lattice) + list(other.lattice),
                                                          self.ambient.rank))

    def __and__(self, other):
        self._check(other)
        return AbelianSubgroup(self.ambient, _lattice.intersect(self.lattice, other.lattice,
                                                                self.ambient.rank))

    def _check(self, other):
        if self.ambient != other.ambient:
            raise ValueError("subgroups live in different groups")

    def cosets(self) -> list:
        """Canonical coset representatives of a finite-index subgroup."""
        if self.index() is INFINITE:
            raise ValueError("infinite index subgroup has infinitely many cosets")
        ranges = [range(row[c]) for row, c in zip(self.lattice, _lattice.pivots(self.lattice))]
        return [tuple(v) for v in itertools.product(*ranges)]

    def elements(self):
        """All elements of a finite subgroup (reduced), sorted."""
        Q = self.ambient
        return sorted({q for q in Q.elements() if self.contains(q)})

    def scaled(self, k):
        """The subgroup ``kS``."""
        Q = self.ambient
        return AbelianSubgroup.generated_by(Q, [Q.scale(k, g) for g in self.generators()])

    def is_torsion_free_direct_part(self):
        """True when the subgroup meets the torsion coordinates trivially."""
        return all(not any(g[self.ambient.free_rank:]) for g in self.generators())

    def key(self):
        return self.lattice

    def to_json(self):
        return [list(g) for g in self.generators()]

    def __repr__(self):
        return f"AbelianSubgroup(gens={self.generators()}, index={self.index()})"


def reduce(Q: FgAbelianGroup, elem) -> AbelianElement:
    return Q.reduce(elem)


def subgroup_from_generators(Q, gens):
    return AbelianSubgroup.generated_by(Q, gens)


def contains(S: AbelianSubgroup, q) -> bool:
    return S.contains(q)


def index(S: AbelianSubgroup):
    return S.index()


def subgroup_sum(S1, S2):
    return S1 + S2


def intersect(S1, S2):
    return S1 & S2


def power_subgroup(Q: FgAbelianGroup, k: int) -> AbelianSubgroup:
    """``Q[k]``, written additively as ``kQ``."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    return AbelianSubgroup.generated_by(Q, [Q.scale(k, g) for g in Q.generators()])


def seminorm(Q: FgAbelianGroup, q) -> int:
    """Max absolute free coordinate; torsion contributes nothing."""
    return max((abs(c) for c in q[:Q.free_rank]), default=0)


def box_range(k):
    return range(-((k + 1) // 2) + 1, k // 2 + 1)


def box(Q: FgAbelianGroup, k: int) -> Iterator[AbelianElement]:
    """Elements with free coords in ``(-ceil(k/2), floor(k/2)]``, torsion arbitrary."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    ranges = [box_range(k)] * Q.free_rank + [range(m) for m in Q.torsion_moduli]
    return (tuple(v) for v in itertools.product(*ranges))


def box_size(Q: FgAbelianGroup, k: int) -> int:
    return k ** Q.free_rank * Q.torsion_order


def ball(Q: FgAbelianGroup, radius: int) -> list:
    """``{q : ||q|| <= radius}`` (torsion arbitrary)."""
    return list(box(Q, 2 * radius + 1))


def is_finite_to_one_transversal(F: Iterable, S: AbelianSubgroup):
    """Constant per-coset count of the multiset ``F``, or None if uneven."""
    idx = S.index()
    if idx is INFINITE:
        raise ValueError("finite-to-one transversals need a finite-index subgroup")
    counts = {}
    for q in F:
        r = S.residue(q)
        counts[r] = counts.get(r, 0) + 1
    if len(counts) != idx:
        return None
    values = set(counts.values())
    return values.pop() if len(values) == 1 else None


def solve_in_generators(S: AbelianSubgroup, gens: Sequence, q) -> tuple:
    """Integer coefficients ``c`` with ``sum c_j gens_j == q`` in Q.

    The solution is reduced modulo the relation module of ``gens`` so the
    answer is canonical for fixed ``gens``.
    """
    Q = S.ambient
    k = len(gens)
    rels = Q.relation_rows()
    rows = [tuple(g) for g in gens] + rels
    H, U, rank = _lattice.hnf_with_transform(rows, Q.rank)
    basis = [tuple(r) for r in H[:rank]]
    y = _lattice.solve(basis, tuple(q))
    if y is None:
        raise ValueError(f"{tuple(q)} is not in the subgroup generated by {list(gens)}")
    full = [sum(y[i] * U[i][j] for i in range(rank)) for j in range(len(rows))]
    c = full[:k]
    # relation module of gens in Q: projections of the left kernel
    kernel_rows = [tuple(U[i][:k]) for i in range(rank, len(rows))]
    rel = _lattice.hnf(kernel_rows, k) if kernel_rows and k else ()
    return tuple(_lattice.reduce_vector(rel, c)) if rel else tuple(c)


def relations_of(Q: FgAbelianGroup, gens: Sequence) -> list:
    """Basis of ``{c in Z^k : sum c_j gens_j == 0 in Q}``."""
    k = len(gens)
    if k == 0:
        return []
    rows = [tuple(g) for g in gens] + Q.relation_rows()
    _, U, rank = _lattice.hnf_with_transform(rows, Q.rank)
    kernel_rows = [tuple(U[i][:k]) for i in range(rank, len(rows))]
    return [r for r in _lattice.hnf(kernel_rows, k)] if kernel_rows else []


def quotient_invariants(S: AbelianSubgroup):
    """Invariant factors of ``Q/S`` as ``(torsion list, free rank)``."""
    n = S.ambient.rank
    diag, _, _ = _lattice.smith_with_transform(list(S.lattice), n)
    return [d for d in diag if d > 1], n - len(diag)


def saturation(S: AbelianSubgroup) -> AbelianSubgroup:
    """Isolator of S: all q with some nonzero multiple in S."""
    Q = S.ambient
    return AbelianSubgroup(Q, _lattice.saturation(S.lattice, Q.rank))


def exponent_into(S: AbelianSubgroup, target: AbelianSubgroup) -> int:
    """Smallest m >= 1 with ``m S <= target``; requires finite ``[S : S ∩ target]``."""
    inter = S & target
    bound = inter.index_in(S)
    if bound is INFINITE:
        raise ValueError("no positive multiple of S lies in target")
    gens = S.generators()
    Q = S.ambient
    for m in range(1, bound + 1):
        if all(target.contains(Q.scale(m, g)) for g in gens):
            return m
    raise AssertionError("exponent search exceeded the index bound")


@dataclass(frozen=True)
class DecompositionScheme:
    R: AbelianSubgroup
    U: AbelianSubgroup
    V: AbelianSubgroup
    W: tuple
    W_prime: tuple
    m: int
    m_orbits: tuple
    k: int


def _free_complement(Q: FgAbelianGroup, sub_basis_free, within_basis_free):
    """Split a primitive sublattice off a free lattice.

    ``within_basis_free`` is a basis (rows in Z^d) of a free lattice L and
    ``sub_basis_free`` spans a primitive sublattice P of L.  Returns a list of
    rows in Z^d spanning a complement of P inside L.
    """
    L = [list(r) for r in within_basis_free]
    if not L:
        return []
    d = len(L[0])
    coords = [_lattice.solve(_lattice.hnf(L, d), tuple(r)) for r in sub_basis_free]
    Lh = _lattice.hnf(L, d)
    s = len(Lh)
    if not coords:
        return [list(r) for r in Lh]
    diag, P, C = _lattice.smith_with_transform(coords, s)
    if any(x != 1 for x in diag):
        raise ValueError("sublattice is not primitive")
    # rows of C^{-1} form a basis adapted to the coordinate sublattice
    Cinv = _lattice.mat_inverse_unimodular(C)
    rank = len(diag)
    comp = []
    for row in Cinv[rank:]:
        comp.append([sum(row[j] * Lh[j][t] for j in range(s)) for t in range(d)])
    return comp


def decompose(Q: FgAbelianGroup, R: AbelianSubgroup, stabilizers: Sequence[AbelianSubgroup]):
    """Deterministic ``Q = U + V`` and ``V = W_l + W'_l`` splittings.

    ``U`` is the isolator of ``R`` (so ``R`` has finite index in it and it holds
    the torsion), ``V`` is a torsion-free complement, and ``U + W_l`` is the
    isolator of ``R + S_l``.  ``m`` and ``m_l`` are the least exponents that push
    ``U`` into ``R`` and ``U + W_l`` into ``R + S_l``.
    """
    d = Q.free_rank
    U = saturation(R)
    # U contains every torsion axis, so it is determined by its free projection
    U_free = _lattice.hnf([g[:d] for g in U.lattice if any(g[:d])], d) if d else ()
    eye = [[int(i == j) for j in range(d)] for i in range(d)]
    V_rows = _free_complement(Q, U_free, eye) if d else []
    V = AbelianSubgroup.generated_by(Q, [tuple(r) + (0,) * len(Q.torsion_moduli) for r in V_rows])
    Ws, Wps, ms = [], [], []
    for S in stabilizers:
        P = saturation(R + S)
        W = P & V
        W_free = [g[:d] for g in W.generators()]
        Wp_rows = _free_complement(Q, W_free, [g[:d] for g in V.generators()]) if V_rows else []
        Wp = AbelianSubgroup.generated_by(Q, [tuple(r) + (0,) * len(Q.torsion_moduli) for r in Wp_rows])
        Ws.append(W)
        Wps.append(Wp)
        ms.append(exponent_into(U + W, R + S))
    m = exponent_into(U, R)
    k = _lattice.lcm(m, *ms)
    return DecompositionScheme(R, U, V, tuple(Ws), tuple(Wps), m, tuple(ms), k)


def check_decomposition(Q: FgAbelianGroup, scheme: DecompositionScheme, stabilizers) -> list:
    """List violated invariants of a decomposition scheme (empty when valid)."""
    problems = []
    R, U, V = scheme.R, scheme.U, scheme.V
    whole = AbelianSubgroup.whole(Q)
    if (U + V) != whole or (U & V) != AbelianSubgroup.trivial(Q):
        problems.append("Q != U (+) V")
    if not R.is_subgroup_of(U) or R.index_in(U) is INFINITE:
        problems.append("R not of finite index in U")
    torsion = AbelianSubgroup.generated_by(Q, [g for g in Q.generators()[Q.free_rank:]])
    if not torsion.is_subgroup_of(U):
        problems.append("torsion not inside U")
    if not V.is_torsion_free_direct_part():
        problems.append("V has torsion")
    if not all(R.contains(Q.scale(scheme.m, g)) for g in U.generators()):
        problems.append("U[m] not inside R")
    for l, S in enumerate(stabilizers):
        W, Wp = scheme.W[l], scheme.W_prime[l]
        if (W + Wp) != V or (W & Wp) != AbelianSubgroup.trivial(Q):
            problems.append(f"V != W_{l} (+) W'_{l}")
        RS = R + S
        UW = U + W
        if not RS.is_subgroup_of(UW) or RS.index_in(UW) is INFINITE:
            problems.append(f"R + S_{l} not of finite index in U + W_{l}")
        if not all(RS.contains(Q.scale(scheme.m_orbits[l], g)) for g in UW.generators()):
            problems.append(f"(U + W_{l})[m_{l}] not inside R + S_{l}")
    return problems
