import itertools
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosofic.fg_abelian import (INFINITE, AbelianSubgroup, FgAbelianGroup, ball, box, box_size,
                                check_decomposition, decompose, index_product,
                                is_finite_to_one_transversal, power_subgroup, seminorm,
                                solve_in_generators, subgroup_from_generators)

Z = FgAbelianGroup(1)
Z2 = FgAbelianGroup(2)
Z_Z2 = FgAbelianGroup(1, (2,))
Z_Z3 = FgAbelianGroup(1, (3,))
Z4 = FgAbelianGroup(0, (4,))
Z6 = FgAbelianGroup(0, (6,))
Z2_Z4 = FgAbelianGroup(2, (4,))


def sub(Q, *gens):
    return AbelianSubgroup.generated_by(Q, gens)


def test_reduce_examples():
    assert Z_Z3.reduce((5, 7)) == (5, 1)
    assert Z_Z3.reduce((0, 0)) == (0, 0)
    assert Z4.reduce((-1,)) == (3,)
    with pytest.raises(ValueError):
        Z_Z3.reduce((1,))


def test_invariant_factor_order():
    with pytest.raises(ValueError):
        FgAbelianGroup.invariant(0, (4, 6))
    assert FgAbelianGroup.invariant(0, (2, 4)).torsion_order == 8
    # the plain constructor accepts any moduli >= 2 (e.g. Z/2 + Z/3 for a product of orbits)
    assert FgAbelianGroup(0, (2, 3)).order == 6
    with pytest.raises(ValueError):
        FgAbelianGroup(0, (1,))
    with pytest.raises(ValueError):
        FgAbelianGroup(2, (), ("a", "a"))


def test_subgroup_examples():
    assert sub(Z, (2,), (4,)) == sub(Z, (2,))
    assert subgroup_from_generators(Z2, [(2, 0), (0, 3)]).lattice == ((2, 0), (0, 3))
    assert sorted(sub(Z6, (2,)).elements()) == [(0,), (2,), (4,)]


def test_contains_examples():
    assert sub(Z, (2,)).contains((4,))
    assert not sub(Z, (2,)).contains((3,))
    assert sub(Z2, (2, 0), (0, 3)).contains((2, 3))


def test_index_examples():
    assert sub(Z, (3,)).index() == 3
    assert sub(Z2, (2, 0), (0, 3)).index() == 6
    assert sub(Z).index() is INFINITE
    # brute-force residues for the diagonal lattice
    S = sub(Z2, (2, 0), (0, 3))
    reps = {S.residue((a, b)) for a in range(-5, 6) for b in range(-5, 6)}
    assert len(reps) == 6


def test_sum_and_intersection():
    assert sub(Z, (2,)) + sub(Z, (3,)) == AbelianSubgroup.whole(Z)
    assert sub(Z, (4,)) & sub(Z, (6,)) == sub(Z, (12,))
    S = sub(Z_Z2, (2, 0)) + sub(Z_Z2, (0, 1))
    assert S.index() == 2
    assert len(S.cosets()) == 2


def test_power_subgroup():
    assert power_subgroup(Z, 3) == sub(Z, (3,))
    P = power_subgroup(Z_Z2, 2)
    assert P == sub(Z_Z2, (2, 0)) and P.index() == 4
    assert power_subgroup(Z_Z2, 1) == AbelianSubgroup.whole(Z_Z2)
    with pytest.raises(ValueError):
        power_subgroup(Z, 0)


def test_seminorm():
    assert seminorm(Z_Z3, (5, 2)) == 5
    assert seminorm(Z_Z3, (0, 2)) == 0
    assert seminorm(Z2, (-7, 1)) == 7


def test_box_examples():
    assert list(box(Z, 4)) == [(-1,), (0,), (1,), (2,)]
    assert list(box(Z, 3)) == [(-1,), (0,), (1,)]
    Z_2 = FgAbelianGroup(0, (2,))
    for k in (1, 2, 5):
        assert list(box(Z_2, k)) == [(0,), (1,)]
    assert box_size(Z2_Z4, 3) == 9 * 4


def test_transversal_examples():
    assert is_finite_to_one_transversal(list(box(Z, 3)), sub(Z, (3,))) == 1
    assert is_finite_to_one_transversal([(i,) for i in range(6)], sub(Z, (3,))) == 2
    assert is_finite_to_one_transversal([(0,), (1,), (1,), (2,)], sub(Z, (3,))) is None
    with pytest.raises(ValueError):
        is_finite_to_one_transversal([(0,)], sub(Z))


def test_solve_in_generators():
    assert solve_in_generators(sub(Z, (2,)), [(2,)], (6,)) == (3,)
    assert solve_in_generators(AbelianSubgroup.whole(Z2), [(1, 0), (1, 1)], (0, 1)) == (-1, 1)
    with pytest.raises(ValueError):
        solve_in_generators(sub(Z, (2,)), [(2,)], (3,))


def test_decompose_examples():
    trivial = sub(Z)
    d = decompose(Z, trivial, [trivial])
    assert d.U == trivial and d.V == AbelianSubgroup.whole(Z)
    assert d.W[0] == trivial and d.W_prime[0] == AbelianSubgroup.whole(Z) and d.k == 1
    d = decompose(Z, sub(Z, (2,)), [trivial])
    assert d.U == AbelianSubgroup.whole(Z) and d.V == trivial and d.m == 2 and d.k == 2
    d = decompose(Z, AbelianSubgroup.whole(Z), [trivial])
    assert d.U == AbelianSubgroup.whole(Z) and d.V == trivial and d.k == 1


@pytest.mark.parametrize("Q, gens, stabs", [
    (Z2, [(2, 0)], [[]]),
    (Z2, [(1, 1)], [[(0, 3)]]),
    (Z_Z2, [(0, 1)], [[]]),
    (Z2_Z4, [(2, 2, 1)], [[], [(0, 1, 0)]]),
    (FgAbelianGroup(3), [(1, 2, 0), (0, 0, 4)], [[(1, 0, 0)]]),
])
def test_decompose_postconditions(Q, gens, stabs):
    R = sub(Q, *gens)
    S = [sub(Q, *g) for g in stabs]
    d = decompose(Q, R, S)
    assert check_decomposition(Q, d, S) == []
    # direct membership checks of the torsion containments
    for u in d.U.generators():
        assert R.contains(Q.scale(d.m, u))
    for l, S_l in enumerate(S):
        for w in (d.U + d.W[l]).generators():
            assert (R + S_l).contains(Q.scale(d.m_orbits[l], w))


# ----------------------------------------------------------------------------
# properties

vec3 = st.lists(st.integers(-6, 6), min_size=3, max_size=3)


def _random_unimodular(draw, n):
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(draw(st.integers(0, 8))):
        i, j = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        if i == j:
            continue
        c = draw(st.integers(-3, 3))
        M[i] = [a + c * b for a, b in zip(M[i], M[j])]
    return M


@st.composite
def mixed_generators(draw):
    gens = draw(st.lists(vec3, min_size=1, max_size=4))
    U = _random_unimodular(draw, len(gens))
    mixed = [[sum(U[i][k] * gens[k][j] for k in range(len(gens))) for j in range(3)]
             for i in range(len(gens))]
    return gens, mixed


@settings(max_examples=200, deadline=None)
@given(mixed_generators())
def test_hnf_canonical_under_unimodular_mixing(pair):
    gens, mixed = pair
    assert sub(Z2_Z4, *gens).lattice == sub(Z2_Z4, *mixed).lattice


@settings(max_examples=200, deadline=None)
@given(st.lists(vec3, min_size=3, max_size=5), st.lists(vec3, min_size=0, max_size=2),
       st.lists(vec3, min_size=0, max_size=2))
def test_index_multiplicativity(base, extra1, extra2):
    S2 = sub(Z2_Z4, *base)
    S1 = sub(Z2_Z4, *(base + extra1))
    S0 = sub(Z2_Z4, *(base + extra1 + extra2))
    a, b = S1.index(), S2.index_in(S1)
    assert S2.index() == index_product(a, b)
    assert S2.index_in(S0) == index_product(S1.index_in(S0), b)


@pytest.mark.parametrize("Q", [Z, Z2, Z_Z2])
def test_box_transversal_law(Q):
    for k in range(1, 13):
        mult = is_finite_to_one_transversal(list(box(Q, k)), power_subgroup(Q, k))
        expected = 1
        for m in Q.torsion_moduli:
            # each coset of Q[k] meets the box |kZ/m| = m/gcd(k, m) times
            expected *= m // gcd(k, m)
        assert mult == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(vec3, min_size=0, max_size=3), vec3)
def test_residue_is_canonical(gens, q):
    S = sub(Z2_Z4, *gens)
    r = S.residue(q)
    assert S.contains(Z2_Z4.sub(q, r))
    assert S.residue(r) == r


def test_ball_is_box():
    assert sorted(ball(Z2, 1)) == sorted(itertools.product((-1, 0, 1), repeat=2))
