import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosofic.fg_abelian import INFINITE, AbelianSubgroup, FgAbelianGroup, box, decompose
from cosofic.perm_module import (FactorMap, FiniteX, LaurentIdeal, PermModule, Pullback, QSet,
                                 UnsupportedSubmodule, WindowSpace, in_Y, pullback,
                                 submodule_from_json, window)

Z = FgAbelianGroup(1)
F2 = FgAbelianGroup(0, (2,))
X_Z = QSet.regular(Z)
M = PermModule(X_Z, F2)


def pt(c):
    return (0, (c,))


def poly_el(coeffs, shift=0, module=M):
    return module.element([(pt(shift + e), (c,)) for e, c in enumerate(coeffs) if c])


def test_act_point_examples():
    assert X_Z.act_point((3,), pt(5)) == pt(8)
    X4 = QSet(Z, (AbelianSubgroup.generated_by(Z, [(4,)]),))
    assert X4.act_point((4,), X4.basepoint(0)) == X4.basepoint(0)
    assert X4.act_point((3,), X4.point(0, (2,))) == X4.point(0, (1,))


def test_act_module_examples():
    d0 = M.delta(pt(0))
    assert M.act((1,), d0) == M.delta(pt(-1))
    assert M.act((0,), d0) == d0
    n = M.add(d0, M.delta(pt(2)))
    assert M.act((-3,), M.act((3,), n)) == n


def test_window_examples():
    assert window(box(Z, 3), X_Z) == (pt(-1), pt(0), pt(1))
    triv = AbelianSubgroup.trivial(Z)
    two = QSet(Z, (triv, triv))
    assert window([(0,)], two) == (two.basepoint(0), two.basepoint(1))
    X2 = QSet(Z, (AbelianSubgroup.generated_by(Z, [(2,)]),))
    assert window([(0,), (1,), (2,)], X2) == (X2.point(0, (0,)), X2.point(0, (1,)))


def test_in_Y_examples():
    triv = AbelianSubgroup.trivial(Z)
    sch = decompose(Z, triv, [triv])
    i = 4
    I = list(box(Z, i))
    assert in_Y(pt(0), sch, I, X_Z)
    assert not in_Y(pt(i + 5), sch, I, X_Z)
    sch2 = decompose(Z, AbelianSubgroup.generated_by(Z, [(2,)]), [triv])
    assert all(in_Y(pt(c), sch2, I, X_Z) for c in range(-20, 20))


def test_factor_map_examples():
    fm = FactorMap(AbelianSubgroup.generated_by(Z, [(5,)]), X_Z, F2)
    assert fm.target_set.size() == 5
    ident = FactorMap(AbelianSubgroup.trivial(Z), X_Z, F2)
    n = poly_el([1, 0, 1, 1], shift=-2)
    assert [x for x, _ in ident.push(n)] == [x for x, _ in n]
    i = 4
    fm = FactorMap(AbelianSubgroup.generated_by(Z, [(i,)]), X_Z, F2)
    assert fm.push(M.add(M.delta(pt(0)), M.delta(pt(i)))) == fm.target.zero()
    MZ = PermModule(X_Z, Z)
    fmz = FactorMap(AbelianSubgroup.generated_by(Z, [(i,)]), X_Z, Z)
    pushed = fmz.push(MZ.add(MZ.delta(pt(0)), MZ.delta(pt(i))))
    assert pushed == fmz.target.element([(fmz.push_point(pt(0)), (2,))])


def test_pull_within_examples():
    fm = FactorMap(AbelianSubgroup.generated_by(Z, [(3,)]), X_Z, F2)
    Y = window(box(Z, 3), X_Z)
    one_bar = fm.target.delta(fm.push_point(pt(1)))
    assert fm.pull_within(one_bar, Y) == M.delta(pt(1))
    assert fm.pull_within(fm.target.zero(), Y) == M.zero()
    rng = random.Random(0)
    for _ in range(100):
        nbar = fm.target.element([(fm.push_point(pt(c)), (1,)) for c in range(3) if rng.random() < .5])
        assert fm.push(fm.pull_within(nbar, Y)) == nbar
    with pytest.raises(ValueError):
        fm.pull_within(one_bar, (pt(0), pt(3)))


def test_laurent_examples():
    I = LaurentIdeal(M, (1, 1))
    assert I.contains(poly_el([1, 0, 0, 0, 0, 1]))
    assert not I.contains(M.delta(pt(0)))
    # Laurent shift does not matter
    assert I.contains(poly_el([1, 1], shift=-7))
    J = LaurentIdeal.generated_by(M, [(1, 1), (0, 1, 1)])
    assert J.gen == (1, 1) and J.index() == 2
    assert LaurentIdeal(M, ()).index() is INFINITE
    assert FiniteX.full(PermModule(QSet.regular(FgAbelianGroup(0, (3,))), F2)).index() == 1
    assert I.invariant((7,))
    with pytest.raises(UnsupportedSubmodule):
        LaurentIdeal(PermModule(X_Z, FgAbelianGroup(0, (4,))), (1, 1))


def test_pullback_examples():
    fm = FactorMap(AbelianSubgroup.generated_by(Z, [(3,)]), X_Z, F2)
    tgt = fm.target
    d = lambda c: tgt.delta(fm.push_point(pt(c)))  # noqa: E731
    nbar = FiniteX.generated_by(tgt, [tgt.add(d(0), d(1)), tgt.add(d(1), d(2))])
    P = Pullback(fm, nbar)
    assert P.contains(poly_el([1, 0, 0, 1]))
    assert not P.contains(M.delta(pt(0)))
    # the invariant quotient ideal canonicalizes to the Laurent ideal (1+t)
    canon = pullback(fm, nbar)
    assert isinstance(canon, LaurentIdeal) and canon.gen == (1, 1)


def test_finitex_invariance_examples():
    Q2 = FgAbelianGroup(0, (2,))
    M2 = PermModule(QSet.regular(Q2), F2)
    a, b = M2.delta((0, (0,))), M2.delta((0, (1,)))
    assert FiniteX.generated_by(M2, [M2.add(a, b)]).invariant((1,))
    assert not FiniteX.generated_by(M2, [a]).invariant((1,))
    with pytest.raises(ValueError):
        FiniteX.zero(M)  # X infinite


def test_json_round_trip():
    S = LaurentIdeal(M, (1, 0, 1))
    assert submodule_from_json(M, S.to_json()).key() == S.key()
    fm = FactorMap(AbelianSubgroup.generated_by(Z, [(3,)]), X_Z, F2)
    P = Pullback(fm, FiniteX.zero(fm.target))
    loaded = submodule_from_json(M, P.to_json())
    # an invariant pullback loads in canonical Laurent form: here the ideal (t^3 - 1)
    assert loaded.key() == pullback(fm, FiniteX.zero(fm.target)).key()
    assert loaded.key() == LaurentIdeal(M, (1, 0, 0, 1)).key()


# ----------------------------------------------------------------------------
# properties

Z2 = FgAbelianGroup(2)
MZ2 = PermModule(QSet(Z2, (AbelianSubgroup.trivial(Z2),
                           AbelianSubgroup.generated_by(Z2, [(0, 3)]))), FgAbelianGroup(1, (4,)))

coord2 = st.tuples(st.integers(-4, 4), st.integers(-4, 4))
value2 = st.tuples(st.integers(-3, 3), st.integers(0, 3))


@st.composite
def elements_Z2(draw):
    items = draw(st.lists(st.tuples(st.integers(0, 1), coord2, value2), max_size=5))
    return MZ2.element([(MZ2.X.point(l, c), v) for l, c, v in items])


@settings(max_examples=500, deadline=None)
@given(elements_Z2(), elements_Z2(), coord2, coord2)
def test_action_laws(m, n, q1, q2):
    act = MZ2.act
    assert act(q1, MZ2.add(m, n)) == MZ2.add(act(q1, m), act(q1, n))
    assert act(q2, act(q1, n)) == act(Z2.add(q1, q2), n)
    assert act(Z2.zero(), n) == n


@settings(max_examples=200, deadline=None)
@given(elements_Z2(), coord2, st.integers(1, 4))
def test_factor_map_equivariance(n, q, i):
    fm = FactorMap(AbelianSubgroup.generated_by(Z2, [(i, 0)]), MZ2.X, MZ2.B)
    assert fm.push(MZ2.act(q, n)) == fm.target.act(q, fm.push(n))


def test_push_injective_on_transversal_window():
    # kernel elements supported in a transversal window are zero, so H + (ker ∩ B^Y) = H
    for i in range(1, 7):
        fm = FactorMap(AbelianSubgroup.generated_by(Z, [(i,)]), X_Z, F2)
        Y = window(box(Z, i), X_Z)
        seen = set()
        for bits in itertools.product((0, 1), repeat=len(Y)):
            n = M.element([(y, (b,)) for y, b in zip(Y, bits) if b])
            seen.add(fm.push(n))
        assert len(seen) == 2 ** len(Y)


def _f2_span_contains(rows, target):
    """Gaussian elimination over F_2 on int bitmasks (independent of the library)."""
    basis = {}
    for r in rows:
        while r:
            h = r.bit_length() - 1
            if h in basis:
                r ^= basis[h]
            else:
                basis[h] = r
                break
    while target:
        h = target.bit_length() - 1
        if h not in basis:
            return False
        target ^= basis[h]
    return True


def _mask(coeffs):
    return sum(1 << e for e, c in enumerate(coeffs) if c % 2)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=13),
       st.lists(st.integers(0, 1), min_size=1, max_size=5).filter(lambda g: any(g)))
def test_laurent_membership_matches_span(f, g):
    I = LaurentIdeal(M, tuple(g))
    # strip trailing zeros and the t-power from g the same way a reader would
    gm = _mask(g)
    while not gm & 1:
        gm >>= 1
    fm = _mask(f)
    deg_f = fm.bit_length() - 1
    deg_g = gm.bit_length() - 1
    shifts = [gm << j for j in range(max(deg_f - deg_g + 1, 0))]
    expected = fm == 0 or _f2_span_contains(shifts, fm)
    assert I.contains(poly_el(f)) == expected


@pytest.mark.parametrize("i", range(1, 9))
def test_pullback_membership_exhaustive(i):
    rng = random.Random(i)
    fm = FactorMap(AbelianSubgroup.generated_by(Z, [(i,)]), X_Z, F2)
    tgt = fm.target
    for _ in range(4):
        gens_bits = [[rng.randint(0, 1) for _ in range(i)] for _ in range(rng.randint(0, 3))]
        gens = [tgt.element([(fm.push_point(pt(c)), (1,)) for c, b in enumerate(bits) if b])
                for bits in gens_bits]
        P = Pullback(fm, FiniteX.generated_by(tgt, gens))
        span = set()
        for coeffs in itertools.product((0, 1), repeat=len(gens_bits)):
            v = 0
            for c, bits in zip(coeffs, gens_bits):
                if c:
                    v ^= _mask(bits)
            span.add(v)
        for _ in range(40):
            support = rng.sample(range(-3 * i, 3 * i + 1), rng.randint(0, 6))
            n = M.element([(pt(c), (1,)) for c in support])
            folded = 0
            for c in support:
                folded ^= 1 << (c % i)
            assert P.contains(n) == (folded in span)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=6).filter(any),
       st.lists(st.integers(-6, 6), max_size=6))
def test_laurent_window_lattice_matches_membership(g, support):
    I = LaurentIdeal(M, tuple(g))
    pts = sorted({pt(c) for c in range(-4, 5)})
    space = WindowSpace(M, pts)
    L = I.window_lattice(space)
    n = M.element([(pt(c), (1,)) for c in support if -4 <= c <= 4])
    assert L.contains(space.to_vector(n)) == I.contains(n)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=6).filter(any),
       st.lists(st.integers(-8, 8), max_size=8))
def test_laurent_reduce_is_a_residue(g, support):
    I = LaurentIdeal(M, tuple(g))
    n = M.element([(pt(c), (1,)) for c in support])
    r = I.reduce(n)
    assert I.contains(M.sub(n, r))
    assert I.reduce(r) == r
