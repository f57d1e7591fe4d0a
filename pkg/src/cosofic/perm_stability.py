"""Finite symmetric groups, coset actions and relation defects.

Permutations act on the right: ``i.(p*q) = (i.p).q``, i.e. ``p*q`` applies p
first.  Words are lists of ``(name, exponent)`` with exponent ±1 and are
evaluated left to right, with ``x^y = y^-1 x y`` and ``[x, y] = x^-1 y^-1 x y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._rng import stream
from .fg_abelian import INFINITE


class Permutation(tuple):
    """Images of ``0..n-1``."""

    __slots__ = ()

    def __new__(cls, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError("not a permutation")
        return super().__new__(cls, images)

    @classmethod
    def identity(cls, n):
        return cls(range(n))

    @classmethod
    def transposition(cls, n, a, b):
        img = list(range(n))
        img[a], img[b] = b, a
        return cls(img)

    @property
    def degree(self):
        return len(self)

    def __mul__(self, other):
        if len(self) != len(other):
            raise ValueError("degree mismatch")
        return Permutation(other[i] for i in self)

    def inverse(self):
        out = [0] * len(self)
        for i, j in enumerate(self):
            out[j] = i
        return Permutation(out)

    def fixed_points(self):
        return sum(1 for i, j in enumerate(self) if i == j)


def hamming(sigma: Permutation, tau: Permutation) -> Fraction:
    """``d_n(σ, τ) = 1 - |Fix(σ^-1 τ)| / n``."""
    if len(sigma) != len(tau):
        raise ValueError("degree mismatch")
    n = len(sigma)
    if n == 0:
        return Fraction(0)
    return Fraction(sum(1 for a, b in zip(sigma, tau) if a != b), n)


@dataclass(frozen=True)
class GeneratorAssignment:
    perms: dict  # name -> Permutation

    @property
    def degree(self):
        return len(next(iter(self.perms.values())))

    def __post_init__(self):
        if len({len(p) for p in self.perms.values()}) > 1:
            raise ValueError("all permutations must have the same degree")


def evaluate_word(assignment: GeneratorAssignment, word) -> Permutation:
    out = Permutation.identity(assignment.degree)
    inverses = {}
    for name, e in word:
        if name not in assignment.perms:
            raise KeyError(f"unknown generator {name!r}")
        p = assignment.perms[name]
        if e < 0:
            if name not in inverses:
                inverses[name] = p.inverse()
            p = inverses[name]
        for _ in range(abs(e)):
            out = out * p
    return out


def word_inverse(word):
    return [(name, -e) for name, e in reversed(word)]


def word_power(word, k):
    if k < 0:
        return word_inverse(word) * (-k)
    return list(word) * k


def word_conjugate(x, y):
    """``x^y = y^-1 x y``."""
    return word_inverse(y) + list(x) + list(y)


def word_commutator(x, y):
    """``[x, y] = x^-1 y^-1 x y``."""
    return word_inverse(x) + word_inverse(y) + list(x) + list(y)


def lamplighter_relation(j, b="b", t="t"):
    """``[b, b^{t^j}]``."""
    return word_commutator([(b, 1)], word_conjugate([(b, 1)], word_power([(t, 1)], j)))


def occurrences(word, name):
    return sum(abs(e) for n, e in word if n == name)


def relation_defect(assignment, words):
    """``d_n(w, id)`` per word and the maximum."""
    n = assignment.degree
    ident = Permutation.identity(n)
    per = [hamming(evaluate_word(assignment, w), ident) for w in words]
    return (max(per) if per else Fraction(0)), per


class CosetIndexError(ValueError):
    pass


def coset_action(G, K, generators: dict, bound=100_000):
    """Right action of the named generators on the cosets ``Kx``.

    Cosets are discovered breadth first in generator order; a coset's label
    is its discovery index and its representative the first element found.
    Returns ``(assignment, representatives)``.
    """
    idx = K.index()
    if idx is INFINITE or idx > bound:
        raise CosetIndexError(f"index {idx} exceeds the coset bound {bound}")
    reps = [G.identity()]
    inv_reps = [G.identity()]
    names = list(generators)
    table = {name: {} for name in names}

    def find(y):
        for j, r_inv in enumerate(inv_reps):
            if K.contains(G.multiply(y, r_inv)):
                return j
        return None

    head = 0
    while head < len(reps):
        x = reps[head]
        for name in names:
            y = G.multiply(x, generators[name])
            j = find(y)
            if j is None:
                j = len(reps)
                reps.append(y)
                inv_reps.append(G.inverse(y))
                if len(reps) > idx:
                    raise AssertionError("coset enumeration exceeded the index")
            table[name][head] = j
        head += 1
    n = len(reps)
    if n != idx:
        raise AssertionError(f"found {n} cosets, expected {idx}")
    perms = {name: Permutation(table[name][i] for i in range(n)) for name in names}
    return GeneratorAssignment(perms), reps


def regular_lamplighter_assignment(k, p=2):
    """Action of ``Z/p wr Z`` on the cosets of ``K = (kZ, ideal(t^k - 1))``.

    The image is the regular representation of ``Z/p wr Z/k`` on
    ``k p^k`` points, with generators ``b = δ_0`` and ``t = 1``.
    """
    from .perm_module import LaurentIdeal
    from .wreath import GoursatTriplet, WreathGroup

    G = WreathGroup.lamplighter(p)
    M = G.module
    gen = [(-1) % p] + [0] * (k - 1) + [1]
    N = LaurentIdeal(M, tuple(gen))
    K = GoursatTriplet(G, None, N, [((k,), M.zero())])
    gens = {"b": G.from_module(M.delta((0, (0,)))), "t": G.lift((1,))}
    assignment, reps = coset_action(G, K, gens)
    return assignment, G, K, gens, reps


def perturb(perm: Permutation, rng, count):
    """Compose with ``count`` random transpositions of distinct points."""
    n = len(perm)
    out = perm
    swaps = []
    for _ in range(count):
        a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
        swaps.append((a, b))
        out = out * Permutation.transposition(n, a, b)
    return out, swaps


def stability_demo(k=4, j_max=12, perturbations=0, seed=0, target="t", p=2, max_k=8):
    """Exact witness ``(b, t)`` from ``Z/p wr Z/k`` and defects of a perturbed pair."""
    if k > max_k:
        raise ValueError(f"k = {k} exceeds the configured bound {max_k}")
    exact, *_ = regular_lamplighter_assignment(k, p)
    n = exact.degree
    words = [lamplighter_relation(j) for j in range(1, j_max + 1)]
    exact_max, exact_defects = relation_defect(exact, words)
    rng = stream(seed, k, "perturb")
    perms = dict(exact.perms)
    perms[target], swaps = perturb(perms[target], rng, perturbations)
    pert = GeneratorAssignment(perms)
    pert_max, pert_defects = relation_defect(pert, words)
    dist = {name: hamming(exact.perms[name], pert.perms[name]) for name in exact.perms}
    rows = []
    for j, w, de, dp in zip(range(1, j_max + 1), words, exact_defects, pert_defects):
        lip = sum(occurrences(w, name) * dist[name] for name in dist)
        transposition_bound = Fraction(4 * occurrences(w, target), n) * max(perturbations, 1)
        rows.append({"j": j, "exact_defect": de, "perturbed_defect": dp,
                     "lipschitz_bound": lip, "transposition_bound": transposition_bound,
                     "occurrences": occurrences(w, target)})
    return {"k": k, "n": n, "target": target, "swaps": swaps, "distances": dist,
            "exact_max_defect": exact_max, "perturbed_max_defect": pert_max, "rows": rows,
            "exact": exact, "perturbed": pert}
