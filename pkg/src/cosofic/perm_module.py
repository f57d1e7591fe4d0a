"""Q-sets with finitely many orbits and the permutational module ``N = B^X``.

Points of X are ``(orbit, coset)`` pairs, the coset being the canonical HNF
residue modulo the orbit stabilizer.  Module elements are sorted tuples of
``(point, value)`` pairs with zero values stripped.

Action convention: ``(n^q)(x) = n(q.x)``, so acting by q moves the support of
n by ``-q``.

Three submodule representations are provided, each with an exact membership
oracle: :class:`FiniteX` (X finite, a lattice over all of ``B^X``),
:class:`LaurentIdeal` (X = Q = Z regular, B = Z/p, a principal ideal of
``F_p[t, t^-1]``) and :class:`Pullback` (preimage of a lattice under a factor
map onto a finite quotient set).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import _fpoly, _lattice
from .fg_abelian import INFINITE, AbelianSubgroup, FgAbelianGroup


class UnsupportedSubmodule(ValueError):
    """The requested operation has no exact implementation for this representation."""


@dataclass(frozen=True)
class QSet:
    Q: FgAbelianGroup
    stabilizers: tuple
    labels: tuple = ()

    def __post_init__(self):
        if not self.stabilizers:
            raise ValueError("a Q-set needs at least one orbit")
        for S in self.stabilizers:
            if S.ambient != self.Q:
                raise ValueError("stabilizer lives in a different group")
        labels = tuple(self.labels) or tuple(f"x{l}" for l in range(len(self.stabilizers)))
        object.__setattr__(self, "stabilizers", tuple(self.stabilizers))
        object.__setattr__(self, "labels", labels)

    @classmethod
    def regular(cls, Q):
        return cls(Q, (AbelianSubgroup.trivial(Q),))

    @property
    def num_orbits(self):
        return len(self.stabilizers)

    def point(self, l, q):
        return (l, self.stabilizers[l].residue(self.Q.reduce(q)))

    def basepoint(self, l):
        return self.point(l, self.Q.zero())

    def act_point(self, q, x):
        l, c = x
        return (l, self.stabilizers[l].residue([a + b for a, b in zip(q, c)]))

    @property
    def is_finite(self):
        return all(S.index() is not INFINITE for S in self.stabilizers)

    def size(self):
        return index_sum(S.index() for S in self.stabilizers)

    def points(self):
        if not self.is_finite:
            raise ValueError("X is infinite")
        return [(l, c) for l, S in enumerate(self.stabilizers) for c in S.cosets()]

    def is_regular_Z(self):
        Q = self.Q
        return (Q.free_rank == 1 and not Q.torsion_moduli and self.num_orbits == 1
                and not self.stabilizers[0].generators())

    def to_json(self):
        return {"stabilizers": [S.to_json() for S in self.stabilizers], "labels": list(self.labels)}

    @classmethod
    def from_json(cls, Q, data):
        stabs = tuple(AbelianSubgroup.generated_by(Q, g) for g in data.get("stabilizers", [[]]))
        return cls(Q, stabs, tuple(data.get("labels", ())))


def index_sum(values):
    out = 0
    for v in values:
        if v is INFINITE:
            return INFINITE
        out += v
    return out


def act_point(X: QSet, q, x):
    return X.act_point(q, x)


class ModuleElement(tuple):
    """Finitely supported function X -> B as a sorted tuple of (point, value)."""

    __slots__ = ()

    @property
    def support(self):
        return [x for x, _ in self]

    def as_dict(self):
        return dict(self)

    def value_at(self, x, zero):
        for y, v in self:
            if y == x:
                return v
        return zero

    def __repr__(self):
        return "ModuleElement(" + ", ".join(f"{x}:{v}" for x, v in self) + ")"


@dataclass(frozen=True)
class PermModule:
    """The module ``B^X`` (finitely supported functions)."""

    X: QSet
    B: FgAbelianGroup

    @property
    def Q(self):
        return self.X.Q

    def zero(self):
        return ModuleElement()

    def element(self, mapping):
        """Build an element from ``{point: value}`` or an iterable of pairs."""
        items = mapping.items() if isinstance(mapping, dict) else mapping
        acc = {}
        zero = self.B.zero()
        for x, v in items:
            x = (x[0], tuple(x[1]))
            prev = acc.get(x, zero)
            acc[x] = self.B.reduce([a + b for a, b in zip(prev, v)])
        return ModuleElement(sorted((x, v) for x, v in acc.items() if any(v)))

    def delta(self, x, value=None):
        if value is None:
            value = tuple(int(j == 0) for j in range(self.B.rank))
        return self.element([(x, value)])

    def add(self, a, b):
        if not a:
            return b
        if not b:
            return a
        acc = dict(a)
        B = self.B
        for x, v in b:
            prev = acc.get(x)
            if prev is None:
                acc[x] = v
                continue
            s = B.reduce([c + d for c, d in zip(prev, v)])
            if any(s):
                acc[x] = s
            else:
                del acc[x]
        return ModuleElement(sorted(acc.items()))

    def neg(self, a):
        return ModuleElement((x, self.B.neg(v)) for x, v in a)

    def sub(self, a, b):
        return self.add(a, self.neg(b)) if b else a

    def scale(self, k, a):
        return self.element([(x, tuple(k * c for c in v)) for x, v in a])

    def act(self, q, n):
        """``n^q`` with ``(n^q)(x) = n(q.x)``."""
        if not n or not any(q):
            return n
        minus_q = self.Q.neg(q)
        return ModuleElement(sorted((self.X.act_point(minus_q, x), v) for x, v in n))

    def seminorm(self, n):
        d = self.B.free_rank
        return max((abs(c) for _, v in n for c in v[:d]), default=0)

    def to_json(self, n):
        return [{"orbit": x[0], "coset": list(x[1]), "value": list(v)} for x, v in n]

    def from_json(self, data):
        return self.element([(self.X.point(int(d.get("orbit", 0)), d["coset"]), tuple(d["value"]))
                             for d in data])


def act_module(M: PermModule, q, n):
    return M.act(q, n)


def window(I: Iterable, X: QSet):
    """``Z = union_l I.x_l`` as a sorted, deduplicated tuple of points."""
    pts = set()
    for q in I:
        for l in range(X.num_orbits):
            pts.add(X.point(l, q))
    return tuple(sorted(pts))


class WindowSpace:
    """Coordinates for ``B^P`` with P a finite point list.

    Coordinates follow the FgAbelianGroup convention: all free coordinates
    (point-major) first, then all torsion coordinates.
    """

    def __init__(self, module: PermModule, points: Sequence):
        self.module = module
        self.points = tuple(points)
        self.pos = {x: k for k, x in enumerate(self.points)}
        if len(self.pos) != len(self.points):
            raise ValueError("window points must be distinct")
        B = module.B
        self.df, self.dt = B.free_rank, len(B.torsion_moduli)
        P = len(self.points)
        self.C = FgAbelianGroup(P * self.df, B.torsion_moduli * P)

    def coord(self, k, c):
        if c < self.df:
            return k * self.df + c
        return len(self.points) * self.df + k * self.dt + (c - self.df)

    def to_vector(self, n):
        """Coordinate vector of n, or None if the support leaves the window."""
        v = [0] * self.C.rank
        for x, val in n:
            k = self.pos.get(x)
            if k is None:
                return None
            for c, a in enumerate(val):
                v[self.coord(k, c)] = a
        return tuple(v)

    def from_vector(self, v):
        items = []
        nB = self.df + self.dt
        for k, x in enumerate(self.points):
            items.append((x, tuple(v[self.coord(k, c)] for c in range(nB))))
        return self.module.element(items)

    def unit(self, k, c):
        v = [0] * self.C.rank
        v[self.coord(k, c)] = 1
        return v

    def full(self):
        return AbelianSubgroup.whole(self.C)

    def lattice(self, elements):
        vecs = []
        for n in elements:
            v = self.to_vector(n)
            if v is None:
                raise ValueError("element is not supported in the window")
            vecs.append(v)
        return AbelianSubgroup.generated_by(self.C, vecs)

    def elements(self, sub: AbelianSubgroup):
        """All elements of a finite coordinate subgroup, as module elements."""
        return [self.from_vector(v) for v in sub.elements()]


def _linear_preimage(src: WindowSpace, tgt: WindowSpace, images, target: AbelianSubgroup):
    """``{v in C_src : A v in target}`` where ``images[j] = A e_j``."""
    n_src = src.C.rank
    rows = [tuple(img) for img in images] + list(target.lattice)
    ker = _lattice.left_kernel(rows, tgt.C.rank)
    vecs = [tuple(c[:n_src]) for c in ker] + src.C.relation_rows()
    return AbelianSubgroup(src.C, _lattice.hnf(vecs, n_src))


def _linear_image(src: WindowSpace, tgt: WindowSpace, images, sub: AbelianSubgroup):
    vecs = []
    for row in sub.lattice:
        out = [0] * tgt.C.rank
        for j, a in enumerate(row):
            if a:
                for t, b in enumerate(images[j]):
                    out[t] += a * b
        vecs.append(out)
    return AbelianSubgroup.generated_by(tgt.C, vecs)


def _point_map_images(src: WindowSpace, tgt: WindowSpace, f, sign=1):
    """Images of src unit vectors under ``e_(x,c) -> sign * e_(f(x),c)`` (f(x) None drops)."""
    images = [None] * src.C.rank
    nB = src.df + src.dt
    for k, x in enumerate(src.points):
        y = f(x)
        for c in range(nB):
            img = [0] * tgt.C.rank
            if y is not None:
                img[tgt.coord(tgt.pos[y], c)] += sign
            images[src.coord(k, c)] = img
    return images


# ----------------------------------------------------------------------------
# factor maps


class FactorMap:
    """``pi : X -> V\\X`` together with the induced module map."""

    def __init__(self, V: AbelianSubgroup, X: QSet, B: FgAbelianGroup):
        if V.ambient != X.Q:
            raise ValueError("V must be a subgroup of the acting group")
        self.V = V
        self.source = PermModule(X, B)
        self.target_set = QSet(X.Q, tuple(S + V for S in X.stabilizers), X.labels)
        self.target = PermModule(self.target_set, B)

    @property
    def kernel_subgroup(self):
        return self.V

    @property
    def target_finite(self):
        return self.target_set.is_finite

    def push_point(self, x):
        l, c = x
        return self.target_set.point(l, c)

    def push(self, n):
        return self.target.element([(self.push_point(x), v) for x, v in n])

    def lift_point(self, xbar):
        """Canonical X point over a canonical X-bar point."""
        l, c = xbar
        return self.source.X.point(l, c)

    def pull_within(self, nbar, Y):
        """Unique preimage of ``nbar`` supported on the transversal Y."""
        fibre = {}
        for y in Y:
            yb = self.push_point(y)
            if yb in fibre:
                raise ValueError(f"Y is not a transversal: {fibre[yb]} and {y} share a fibre")
            fibre[yb] = y
        items = []
        for xb, v in nbar:
            if xb not in fibre:
                raise ValueError(f"Y misses the fibre over {xb}")
            items.append((fibre[xb], v))
        return self.source.element(items)

    def key(self):
        return ("factor", self.V.lattice, self.source.X, self.source.B)

    def __eq__(self, other):
        return isinstance(other, FactorMap) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def factor_map(V, X, B):
    return FactorMap(V, X, B)


def pull_within_Y(pi: FactorMap, nbar, Y):
    return pi.pull_within(nbar, Y)


# ----------------------------------------------------------------------------
# submodules


class Submodule:
    module: PermModule

    def contains(self, n) -> bool:
        raise NotImplementedError

    def __contains__(self, n):
        return self.contains(n)

    def key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, Submodule) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def index(self):
        raise NotImplementedError

    def act(self, q) -> "Submodule":
        """The image ``{n^q : n in S}``."""
        raise NotImplementedError

    def invariant(self, q) -> bool:
        return self.act(q) == self

    def reduce(self, n):
        """Canonical representative of ``n + S``."""
        raise NotImplementedError

    def window_lattice(self, space: WindowSpace) -> AbelianSubgroup:
        """``S ∩ B^P`` in the coordinates of ``space``."""
        raise NotImplementedError

    def diff_preimage(self, q) -> "Submodule":
        """``{m : m - m^q in S}``."""
        raise NotImplementedError

    def intersect(self, other) -> "Submodule":
        raise NotImplementedError

    def _check_module(self, n):
        return n


class FiniteX(Submodule):
    """A subgroup of ``B^X`` for finite X, stored as an HNF lattice."""

    def __init__(self, module: PermModule, lattice: AbelianSubgroup):
        if not module.X.is_finite:
            raise UnsupportedSubmodule("FiniteX needs a finite Q-set")
        self.module = module
        self.space = WindowSpace(module, module.X.points())
        if lattice.ambient != self.space.C:
            raise ValueError("lattice lives in the wrong coordinate group")
        self.lattice = lattice

    @classmethod
    def generated_by(cls, module, gens):
        space = WindowSpace(module, module.X.points())
        return cls(module, space.lattice(gens))

    @classmethod
    def full(cls, module):
        space = WindowSpace(module, module.X.points())
        return cls(module, space.full())

    @classmethod
    def zero(cls, module):
        return cls.generated_by(module, [])

    def contains(self, n):
        v = self.space.to_vector(n)
        if v is None:
            raise ValueError("element is not in B^X")
        return self.lattice.contains(v)

    def key(self):
        return ("finite", self.module, self.lattice.lattice)

    def index(self):
        return self.lattice.index()

    def generators(self):
        return [self.space.from_vector(v) for v in self.lattice.generators()]

    def act(self, q):
        return FiniteX.generated_by(self.module, [self.module.act(q, g) for g in self.generators()])

    def reduce(self, n):
        v = self.space.to_vector(n)
        return self.space.from_vector(self.lattice.residue(v))

    def window_lattice(self, space):
        images = _point_map_images(space, self.space, lambda x: x)
        return _linear_preimage(space, self.space, images, self.lattice)

    def diff_preimage(self, q):
        sp = self.space
        X = self.module.X
        minus_q = self.module.Q.neg(q)
        images = _point_map_images(sp, sp, lambda x: x)
        shifted = _point_map_images(sp, sp, lambda x: X.act_point(minus_q, x))
        diff = [[a - b for a, b in zip(u, w)] for u, w in zip(images, shifted)]
        return FiniteX(self.module, _linear_preimage(sp, sp, diff, self.lattice))

    def intersect(self, other):
        if not isinstance(other, FiniteX) or other.module != self.module:
            raise UnsupportedSubmodule("FiniteX can only be intersected with FiniteX")
        return FiniteX(self.module, self.lattice & other.lattice)

    def __add__(self, other):
        return FiniteX(self.module, self.lattice + other.lattice)

    def elements(self):
        return self.space.elements(self.lattice)

    def to_json(self):
        return {"type": "finite", "gens": [self.module.to_json(g) for g in self.generators()]}

    def __repr__(self):
        return f"FiniteX(gens={self.generators()}, index={self.index()})"


class LaurentIdeal(Submodule):
    """Principal ideal of ``F_p[t, t^-1]`` acting on the regular Z-set."""

    def __init__(self, module: PermModule, generator):
        B = module.B
        if not module.X.is_regular_Z():
            raise UnsupportedSubmodule("Laurent ideals need X = Q = Z with the regular action")
        if B.free_rank or len(B.torsion_moduli) != 1:
            raise UnsupportedSubmodule("Laurent ideals need B = Z/p")
        p = B.torsion_moduli[0]
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise UnsupportedSubmodule(f"Laurent ideals need a prime modulus, got {p}")
        self.module = module
        self.p = p
        _, g = _fpoly.strip_t(_fpoly.trim(generator, p))
        self.gen = _fpoly.monic(g, p)

    @classmethod
    def generated_by(cls, module, polys):
        p = module.B.torsion_moduli[0]
        g = ()
        for poly in polys:
            _, f = _fpoly.strip_t(_fpoly.trim(poly, p))
            g = _fpoly.gcd(g, f, p)
        return cls(module, g)

    @classmethod
    def from_elements(cls, module, elements):
        return cls.generated_by(module, [element_to_poly(module, n)[1] for n in elements])

    def terms(self, n):
        return {x[1][0]: v[0] for x, v in n}

    def contains(self, n):
        if not n:
            return True
        if not self.gen:
            return False
        _, f = element_to_poly(self.module, n)
        return not _fpoly.mod(f, self.gen, self.p)

    def key(self):
        return ("laurent", self.p, self.gen)

    def index(self):
        if not self.gen:
            return INFINITE
        return self.p ** (len(self.gen) - 1)

    @property
    def degree(self):
        return len(self.gen) - 1 if self.gen else None

    def act(self, q):
        return self

    def invariant(self, q):
        return True

    def reduce(self, n):
        if not self.gen:
            return n
        r = _fpoly.laurent_residue(self.terms(n), self.gen, self.p)
        return poly_to_element(self.module, 0, r)

    def window_lattice(self, space):
        xs = [x[1][0] for x in space.points]
        if not xs:
            return space.full()
        lo, hi = min(xs), max(xs)
        hull = WindowSpace(self.module, [(0, (x,)) for x in range(lo, hi + 1)])
        gens = []
        if self.gen:
            d = len(self.gen) - 1
            for j in range(lo, hi - d + 1):
                gens.append(poly_to_element(self.module, j, self.gen))
        L = hull.lattice(gens)
        images = _point_map_images(space, hull, lambda x: x)
        return _linear_preimage(space, hull, images, L)

    def diff_preimage(self, q):
        c = q[0]
        if c == 0:
            return LaurentIdeal(self.module, (1,))
        if not self.gen:
            return LaurentIdeal(self.module, ())
        h = _fpoly.gcd(self.gen, _fpoly.t_power_minus_one(abs(c), self.p), self.p)
        return LaurentIdeal(self.module, _fpoly.divmod_(self.gen, h, self.p)[0])

    def intersect(self, other):
        if not isinstance(other, LaurentIdeal) or other.module != self.module:
            raise UnsupportedSubmodule("Laurent ideals intersect only with Laurent ideals")
        return LaurentIdeal(self.module, _fpoly.lcm(self.gen, other.gen, self.p))

    def to_json(self):
        return {"type": "laurent", "p": self.p, "coeffs": list(self.gen)}

    def __repr__(self):
        return f"LaurentIdeal(p={self.p}, gen={self.gen})"


def element_to_poly(module, n):
    """Split a Laurent element as ``t^v * f`` with f a polynomial."""
    p = module.B.torsion_moduli[0]
    if not n:
        return 0, ()
    exps = {x[1][0]: v[0] for x, v in n}
    lo = min(exps)
    poly = [0] * (max(exps) - lo + 1)
    for e, c in exps.items():
        poly[e - lo] = c
    return lo, _fpoly.trim(poly, p)


def poly_to_element(module, shift, poly):
    return module.element([((0, (shift + e,)), (c,)) for e, c in enumerate(poly) if c])


class Pullback(Submodule):
    """``pi^{-1}(Nbar)`` for a factor map onto a finite quotient set."""

    def __init__(self, fmap: FactorMap, nbar: FiniteX):
        if not fmap.target_finite:
            raise UnsupportedSubmodule("pullbacks need a finite quotient set")
        if nbar.module != fmap.target:
            raise ValueError("Nbar must live in the target module of the factor map")
        self.fmap = fmap
        self.nbar = nbar
        self.module = fmap.source

    def contains(self, n):
        return self.nbar.contains(self.fmap.push(n))

    def key(self):
        return ("pullback", self.fmap.V.lattice, self.nbar.lattice.lattice)

    def index(self):
        return self.nbar.index()

    def act(self, q):
        return Pullback(self.fmap, self.nbar.act(q))

    def invariant(self, q):
        return self.nbar.invariant(q)

    def reduce(self, n):
        rbar = self.nbar.reduce(self.fmap.push(n))
        return self.module.element([(self.fmap.lift_point(xb), v) for xb, v in rbar])

    def window_lattice(self, space):
        tgt = self.nbar.space
        images = _point_map_images(space, tgt, self.fmap.push_point)
        return _linear_preimage(space, tgt, images, self.nbar.lattice)

    def diff_preimage(self, q):
        return Pullback(self.fmap, self.nbar.diff_preimage(q))

    def intersect(self, other):
        if isinstance(other, Pullback) and other.fmap == self.fmap:
            return Pullback(self.fmap, self.nbar.intersect(other.nbar))
        raise UnsupportedSubmodule("pullbacks intersect only along the same factor map")

    def to_json(self):
        return {"type": "pullback", "V": self.fmap.V.to_json(),
                "gens": [self.fmap.target.to_json(g) for g in self.nbar.generators()]}

    def __repr__(self):
        return f"Pullback(V={self.fmap.V.generators()}, nbar={self.nbar})"


def pullback(fmap: FactorMap, nbar: FiniteX) -> Submodule:
    """Build ``pi^{-1}(Nbar)``, canonicalizing to a Laurent ideal when possible.

    For X = Q = Z, B = Z/p and ``V = iZ`` a Q-invariant ``Nbar`` is an ideal of
    ``F_p[t]/(t^i - 1)``, whose preimage is the ideal generated by
    ``gcd(t^i - 1, Nbar)``.
    """
    M = fmap.source
    V = fmap.V
    if (M.X.is_regular_Z() and not M.B.free_rank and len(M.B.torsion_moduli) == 1
            and V.generators()):
        try:
            probe = LaurentIdeal(M, (1,))
        except UnsupportedSubmodule:
            probe = None
        if probe is not None and nbar.invariant((1,)):
            p = probe.p
            i = V.generators()[0][0]
            g = _fpoly.t_power_minus_one(i, p)
            for gen in nbar.generators():
                # lift the X-bar element to exponents 0..i-1
                terms = {x[1][0] % i: v[0] for x, v in gen}
                poly = _fpoly.trim([terms.get(e, 0) for e in range(i)], p)
                g = _fpoly.gcd(g, poly, p)
            return LaurentIdeal(M, g)
    return Pullback(fmap, nbar)


def submodule_contains(S: Submodule, n) -> bool:
    return S.contains(n)


def submodule_canonical(S: Submodule):
    return S.key()


def submodule_index(S: Submodule):
    return S.index()


def submodule_invariant(S: Submodule, q) -> bool:
    return S.invariant(q)


def in_Y(x, scheme, I, X: QSet):
    """Is x in ``Y_l = (U + W_l + I) x_l``?"""
    l, c = x
    A = scheme.U + scheme.W[l] + X.stabilizers[l]
    return any(A.contains([a - b for a, b in zip(c, q)]) for q in I)


def submodule_from_json(module: PermModule, data, V_lookup=None) -> Submodule:
    kind = data.get("type")
    if kind == "laurent":
        p = int(data["p"])
        if module.B.torsion_moduli != (p,) or module.B.free_rank:
            raise ValueError(f"Laurent ideal modulus {p} does not match B")
        return LaurentIdeal.generated_by(module, [tuple(data["coeffs"])])
    if kind == "finite":
        return FiniteX.generated_by(module, [module.from_json(g) for g in data.get("gens", [])])
    if kind == "pullback":
        V = AbelianSubgroup.generated_by(module.Q, data.get("V", []))
        fmap = FactorMap(V, module.X, module.B)
        nbar = FiniteX.generated_by(fmap.target, [fmap.target.from_json(g)
                                                  for g in data.get("gens", [])])
        return pullback(fmap, nbar)
    if kind == "full":
        if module.X.is_finite:
            return FiniteX.full(module)
        return LaurentIdeal(module, (1,))
    raise ValueError(f"unknown submodule type {kind!r}")
