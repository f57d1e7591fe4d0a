import itertools
from pathlib import Path

import pytest

from cosofic import pipeline
from cosofic.config import read_config
from cosofic.fg_abelian import AbelianSubgroup, FgAbelianGroup, ball
from cosofic.perm_module import FactorMap, FiniteX, LaurentIdeal, ModuleElement, Pullback, QSet
from cosofic.wreath import GoursatTriplet, WreathGroup

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"

L = WreathGroup.lamplighter(2)
M = L.module


def pt(c):
    return (0, (c,))


FLAGSHIP_H = GoursatTriplet(L, None, LaurentIdeal(M, (1, 1)), [])


def test_build_scheme_examples():
    s = pipeline.build_scheme(L, FLAGSHIP_H)
    assert s.k == 1 and s.branch == "pullback" and s.normalizer_index == 1
    H = GoursatTriplet(L, None, LaurentIdeal(M, (1, 1, 0, 1)), [((2,), M.delta(pt(0)))])
    s = pipeline.build_scheme(L, H)
    assert s.k == 2 and s.branch == "shortcut"
    bad = GoursatTriplet(L, None, LaurentIdeal(M, ()), [((1,), ModuleElement())])
    with pytest.raises(pipeline.HypothesisViolation):
        pipeline.build_scheme(L, bad)


def test_build_scheme_unsupported():
    Z2 = FgAbelianGroup(2)
    G = WreathGroup(Z2, FgAbelianGroup(0, (2,)), QSet.regular(Z2))
    # Q of rank 2 acting regularly with an infinite-index subgroup is out of scope
    fm = FactorMap(AbelianSubgroup.generated_by(Z2, [(1, 0), (0, 1)]), G.X, G.B)
    H = GoursatTriplet(G, None, Pullback(fm, FiniteX.zero(fm.target)), [])
    with pytest.raises(pipeline.UnsupportedConfiguration):
        pipeline.build_scheme(G, H)


def test_flagship_stage_three():
    st = pipeline.stage(pipeline.build_scheme(L, FLAGSHIP_H), 3)
    assert st.Q_i == AbelianSubgroup.generated_by(L.Q, [(3,)])
    assert st.Z == (pt(-1), pt(0), pt(1))
    assert st.e == 6
    # (t^3 - 1) = (1 + t)(1 + t + t^2) over F_2, so the pullback is the ideal (1 + t)
    assert st.N_i.key() == LaurentIdeal(M, (1, 1)).key()
    assert st.K.Q_H == st.Q_i and st.K.N_H is st.N_i
    assert st.K.validate() == []
    assert st.F.size() == 3 * 2 ** 3


def test_stage_rejects_zero():
    with pytest.raises(ValueError):
        pipeline.stage(pipeline.build_scheme(L, FLAGSHIP_H), 0)


def test_shortcut_stage_is_H():
    H = GoursatTriplet(L, None, LaurentIdeal(M, (1, 1, 0, 1)), [((2,), M.delta(pt(0)))])
    s = pipeline.build_scheme(L, H)
    for i in (1, 2, 3):
        st = pipeline.stage(s, i)
        assert st.K is H and st.N_i is H.N_H
        rep = pipeline.verify_stage(st, H, 100)
        assert pipeline.violations(rep) == 0


def test_lifts_are_shared():
    cfg = read_config(CONFIGS / "ladder.json", {})
    s = pipeline.build_scheme(cfg.G, cfg.H)
    for i in (1, 2, 3):
        K = pipeline.stage(s, i).K
        for a_H, a_K in zip(cfg.H.a, K.a):
            assert a_K is a_H


def test_Q_i_converges_to_R():
    s = pipeline.build_scheme(L, FLAGSHIP_H)
    for rho in range(1, 21):
        i0 = rho + 1
        for i in (i0, i0 + 3):
            st = pipeline.stage(s, i)
            assert [q for q in ball(L.Q, rho) if st.Q_i.contains(q)] == [(0,)]


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_flagship_verify_and_mutants(i):
    st = pipeline.stage(pipeline.build_scheme(L, FLAGSHIP_H), i)
    rep = pipeline.verify_stage(st, FLAGSHIP_H, 2000, seed=1)
    assert pipeline.violations(rep) == 0 and rep["checked"] == 2000
    full = pipeline.mutate_stage_submodule(st, "full")
    assert pipeline.violations(pipeline.verify_stage(st, FLAGSHIP_H, 500, N_i=full)) > 0
    if i >= 2:
        zero = pipeline.mutate_stage_submodule(st, "zero")
        assert pipeline.violations(pipeline.verify_stage(st, FLAGSHIP_H, 500, N_i=zero)) > 0
    with pytest.raises(ValueError):
        pipeline.mutate_stage_submodule(st, "bogus")


def test_transversal_check():
    st = pipeline.stage(pipeline.build_scheme(L, FLAGSHIP_H), 4)
    assert pipeline.transversal_check(st)["status"] == "certified"
    cfg = read_config(CONFIGS / "ladder.json", {})
    s = pipeline.build_scheme(cfg.G, cfg.H)
    assert pipeline.transversal_check(pipeline.stage(s, 1))["status"] == "not-yet"
    cert = pipeline.transversal_check(pipeline.stage(s, 2))
    assert cert["status"] == "certified" and cert["normalizer_index"] == 2


def _finite_X_setup():
    Z = FgAbelianGroup(1)
    X = QSet(Z, (AbelianSubgroup.generated_by(Z, [(4,)]),))
    G = WreathGroup(Z, FgAbelianGroup(0, (2,)), X)
    MG = G.module
    pts = X.points()
    # N_H spanned by the two "antipodal" pairs: invariant under the shift
    N_H = FiniteX.generated_by(MG, [MG.element([(pts[0], (1,)), (pts[2], (1,))]),
                                     MG.element([(pts[1], (1,)), (pts[3], (1,))])])
    return G, GoursatTriplet(G, None, N_H, [])


def test_finite_X_stage_properties_exhaustive():
    G, H = _finite_X_setup()
    MG = G.module
    pts = G.X.points()
    N_all = [MG.element([(x, (b,)) for x, b in zip(pts, bits) if b])
             for bits in itertools.product((0, 1), repeat=len(pts))]
    s = pipeline.build_scheme(G, H)
    assert s.branch == "pullback"
    for i in (1, 2, 3):
        st = pipeline.stage(s, i)
        N_i = st.N_i
        M_i = [n for n in N_all if st.in_M(n)]
        T_i = list(st.F.T_elements())
        H_M = [n for n in M_i if H.N_H.contains(n)]
        # T_i + (N_H ∩ M_i) avoids N_H △ N_i
        for t, n in itertools.product(T_i, H_M):
            x = MG.add(t, n)
            assert H.N_H.contains(x) == N_i.contains(x)
        # normalizer of H inside the window normalizes K_i
        norm = H.normalizer_in_N()
        for m in M_i:
            if norm.contains(m):
                mg = G.from_module(m)
                assert all(st.K.contains(G.conjugate(lift, mg)) for lift in st.K.lifts)
        # [v, g] in N_i for v in V_i
        for v in st.V_i.generators():
            for q in range(-3, 4):
                for n in N_all:
                    c = G.commutator(G.lift(v), G.element((q,), n))
                    assert N_i.contains(c.n)
        assert pipeline.violations(pipeline.verify_stage(st, H, 300)) == 0


def test_free_values_use_separating_subgroup():
    Z = FgAbelianGroup(1)
    X = QSet(Z, (AbelianSubgroup.generated_by(Z, [(3,)]),))
    G = WreathGroup(Z, Z, X)
    MG = G.module
    N_H = FiniteX.generated_by(MG, [MG.element([(x, (1,)) for x in X.points()])])
    H = GoursatTriplet(G, None, N_H, [])
    s = pipeline.build_scheme(G, H)
    prev = None
    for i in (1, 2, 3):
        st = pipeline.stage(s, i)
        for t in st.F.T_elements():
            assert N_H.contains(t) == st.N_i.contains(t)
        assert pipeline.violations(pipeline.verify_stage(st, H, 300)) == 0
        if prev is not None:
            assert st.N_i.index() >= prev
        prev = st.N_i.index()


def test_parse_mode():
    assert pipeline.parse_mode("exact") == (None, 0)
    assert pipeline.parse_mode("mc:500") == (0, 500)
    assert pipeline.parse_mode("hybrid:5:100") == (5, 100)
    for bad in ("mc", "hybrid:1", "fast", "exact:3"):
        with pytest.raises(ValueError):
            pipeline.parse_mode(bad)


def test_run_experiment_reproducible(tmp_path):
    cfg = read_config(CONFIGS / "flagship.json", {"mode": "hybrid:2:400", "depth": 27})
    cfg.stages = (1, 4)
    a = pipeline.run_experiment(cfg)
    b = pipeline.run_experiment(cfg)
    assert a.rows == b.rows and a.config_hash == b.config_hash
    assert pipeline.report_csvs(a) == pipeline.report_csvs(b)
    modes = {r.stage: r.mode for r in a.rows if r.statistic == "p_statistic"}
    assert modes == {1: "exact", 2: "exact", 3: "mc", 4: "mc"}
    # p_i(t) vanishes once t has left Q_i (i > 1)
    assert [v for _, v in a.series("p_statistic", "t")] == [1, 0, 0, 0]
    files = pipeline.write_report(a, cfg.raw, str(tmp_path))
    assert set(files) == {f"{s}.csv" for s in cfg.statistics}
    assert (tmp_path / "manifest.json").exists()


def test_config_hash_ignores_key_order():
    assert pipeline.config_hash({"a": 1, "b": [1, 2]}) == pipeline.config_hash({"b": [1, 2], "a": 1})
    assert pipeline.config_hash({"a": 1}) != pipeline.config_hash({"a": 2})
    assert pipeline.config_hash({"a": 1, "out": "x"}) == pipeline.config_hash({"a": 1})
