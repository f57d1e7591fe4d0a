"""Standard controlled approximations and the convergence experiment.

Given a subgroup H of ``G = B wr_X Q`` with ``[N : N_N(H)]`` finite, stage i
builds a finite-index subgroup ``K_i = (Q_i, N_i, alpha_i)`` and a Folner
transversal ``F_i = Î_i·T_i``; the experiment measures how fast
``F_i * K_i`` approaches ``F_i * H``.

Supported configurations: X finite; Q of free rank at most 1 with B finite;
or H of finite index with ``N_H`` invariant under every ``Q_i`` (then
``K_i = H``).  The first two additionally need the quotient sets
``X̄_i = V_i\\X`` to be finite.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from . import chabauty
from ._rng import stream
from .fg_abelian import (INFINITE, AbelianSubgroup, DecompositionScheme, box, decompose,
                         is_finite_to_one_transversal, power_subgroup)
from .perm_module import (FactorMap, FiniteX, WindowSpace, _linear_image, _point_map_images,
                          pullback, window)
from .wreath import (GoursatTriplet, GroupElement, TransversalSpec, WreathGroup,
                     separating_subgroup)


class HypothesisViolation(ValueError):
    """H does not satisfy the finite normalizer-index hypothesis."""


class UnsupportedConfiguration(ValueError):
    """The construction is not implemented exactly for this input."""


class StageError(RuntimeError):
    """A stage failed one of its construction checks."""


def coset_bound():
    return int(os.environ.get("COSOFIC_COSET_BOUND", 200_000))


def exact_bound():
    return int(os.environ.get("COSOFIC_EXACT_BOUND", 2 ** 24))


@dataclass
class Scheme:
    G: WreathGroup
    H: GoursatTriplet
    decomposition: DecompositionScheme
    branch: str
    normalizer_index: int
    e_cap: int | None = None

    @property
    def k(self):
        return self.decomposition.k

    def e(self, i):
        e = factorial(i)
        return min(e, self.e_cap) if self.e_cap else e


def build_scheme(G: WreathGroup, H: GoursatTriplet, e_cap=None) -> Scheme:
    problems = H.validate()
    if problems:
        raise ValueError("H is not a valid triplet: " + "; ".join(problems))
    d = H.normalizer_in_N().index()
    if d is INFINITE:
        raise HypothesisViolation("[N : N_N(H)] is infinite")
    R = H.Q_H
    dec = decompose(G.Q, R, G.X.stabilizers)
    quotient_finite = all((S + dec.V).index() is not INFINITE for S in G.X.stabilizers)
    finite_H = R.index() is not INFINITE and H.N_H.index() is not INFINITE
    if finite_H:
        branch = "shortcut"
    elif G.X.is_finite:
        branch = "pullback"
    elif G.Q.free_rank <= 1 and G.B.is_finite:
        if not quotient_finite:
            raise UnsupportedConfiguration("V\\X is infinite; the pullback construction "
                                           "needs finite quotient sets")
        branch = "pullback"
    else:
        raise UnsupportedConfiguration(
            "supported: X finite, or Q of free rank <= 1 with B finite, or H of finite index")
    return Scheme(G, H, dec, branch, d, e_cap)


@dataclass
class StageData:
    i: int
    n: int
    Q_i: AbelianSubgroup
    V_i: AbelianSubgroup
    I: list
    Y: tuple
    Z: tuple
    e: int
    N_i: object
    K: GoursatTriplet
    F: TransversalSpec
    fmap: FactorMap | None = None
    nbar: FiniteX | None = None
    notes: list = field(default_factory=list)

    @property
    def T(self):
        return self.F

    def in_M(self, n):
        ys = set(self.Y)
        return all(x in ys for x, _ in n)


def _orbit_transversal(scheme: Scheme, I):
    """``Y = union_l (U + W_l + I) x_l`` as an explicit point list."""
    G = scheme.G
    X, Q = G.X, G.Q
    dec = scheme.decomposition
    pts = set()
    for l, S in enumerate(X.stabilizers):
        A = dec.U + dec.W[l] + S
        if S.index_in(A) is INFINITE:
            raise UnsupportedConfiguration("Y_i would be infinite")
        reps = {X.point(l, Q.zero())}
        frontier = list(reps)
        gens = A.generators()
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = X.act_point(g, x)
                    if y not in reps:
                        reps.add(y)
                        nxt.append(y)
            frontier = nxt
        for x in reps:
            for b in I:
                pts.add(X.act_point(b, x))
    return tuple(sorted(pts))


def stage(scheme: Scheme, i: int) -> StageData:
    if i < 1:
        raise ValueError("stages start at 1")
    G, H, dec = scheme.G, scheme.H, scheme.decomposition
    Q, M = G.Q, G.module
    n = i * dec.k
    Q_i = H.Q_H + power_subgroup(Q, n)
    V_i = dec.V.scaled(n)
    I = list(box(Q, n))
    Z = window(I, G.X)
    e = scheme.e(i)
    F = TransversalSpec(G, I, Z, e)
    if scheme.branch == "shortcut":
        for g in Q_i.generators():
            if not H.N_H.invariant(g):
                raise StageError(f"stage {i}: N_H is not Q_i-invariant, shortcut unavailable")
        if Q_i != H.Q_H:
            raise StageError(f"stage {i}: Q_i differs from Q_H in the shortcut branch")
        return StageData(i, n, Q_i, V_i, I, Z, Z, e, H.N_H, H, F,
                         notes=["shortcut: K_i = H"])
    fmap = FactorMap(V_i, G.X, G.B)
    Y = _orbit_transversal(scheme, I)
    xbar = fmap.target_set.points()
    if len(Y) != len(xbar) or len({fmap.push_point(y) for y in Y}) != len(xbar):
        raise StageError(f"stage {i}: Y_i is not a transversal of the factor map")
    space_Y = WindowSpace(M, Y)
    space_X = WindowSpace(fmap.target, xbar)
    L = H.N_H.window_lattice(space_Y)
    images = _point_map_images(space_Y, space_X, fmap.push_point)
    Lbar = FiniteX(fmap.target, _linear_image(space_Y, space_X, images, L))
    if G.B.is_finite:
        nbar = Lbar
    else:
        if F.T_size() > coset_bound():
            raise UnsupportedConfiguration(f"stage {i}: |T_i| = {F.T_size()} exceeds the "
                                           "explicit separation bound")
        probe = [fmap.push(t) for t in F.T_elements()]
        nbar = separating_subgroup(Lbar, probe, Q_i.generators())
    N_i = pullback(fmap, nbar)
    # R-generators share the stored lifts of H; V_i-generators get a = 0
    alpha = list(zip(H.gens, H.a)) + [(v, M.zero()) for v in V_i.generators()]
    K = GoursatTriplet(G, Q_i, N_i, alpha)
    problems = K.validate()
    if problems:
        raise StageError(f"stage {i}: K_i is not a subgroup (controlled approximation "
                         f"lemma): " + "; ".join(problems))
    return StageData(i, n, Q_i, V_i, I, Y, Z, e, N_i, K, F, fmap, nbar)


# ----------------------------------------------------------------------------
# verification


def _random_lattice_element(rng, space, lattice, spread=2):
    gens = [space.from_vector(v) for v in lattice.generators()]
    M = space.module
    out = M.zero()
    for g in gens:
        c = int(rng.integers(-spread, spread + 1))
        if c:
            out = M.add(out, M.scale(c, g))
    return out


def verify_stage(st: StageData, H: GoursatTriplet, samples=10_000, seed=0, N_i=None):
    """Exact structural checks plus sampled checks of the window lemmas.

    ``N_i`` overrides the stage's submodule (used for mutation controls).
    Returns a dict of violation counts keyed by check name.
    """
    G = H.G
    M = G.module
    N_i = st.N_i if N_i is None else N_i
    report = {"window_transversal": 0, "window_equality": 0, "T_plus_NH": 0,
              "normalizer": 0, "commutator_V": 0, "checked": 0}
    if st.fmap is None:
        # shortcut branch: K_i = H, all statements are identities
        report["window_equality"] = int(N_i != H.N_H)
        return report
    fmap = st.fmap
    Y = st.Y
    if len({fmap.push_point(y) for y in Y}) != len(Y) or not set(st.Z) <= set(Y):
        report["window_transversal"] += 1
    space_Y = WindowSpace(M, Y)
    L_H = H.N_H.window_lattice(space_Y)
    L_i = N_i.window_lattice(space_Y)
    if G.B.is_finite:
        if L_H != L_i:
            report["window_equality"] += 1
    elif not L_H.is_subgroup_of(L_i):
        report["window_equality"] += 1

    rng = stream(seed, st.i, "verify")
    Gi = GoursatTriplet(G, st.Q_i, N_i, list(zip(st.K.gens, st.K.a)))
    normalizer = H.normalizer_in_N()
    L_norm = normalizer.window_lattice(space_Y)
    v_gens = st.V_i.generators()
    ts = st.F.sample(rng, samples)
    for t in ts:
        n = _random_lattice_element(rng, space_Y, L_H)
        x = M.add(t.n, n)
        if H.N_H.contains(x) != N_i.contains(x):
            report["T_plus_NH"] += 1
        m = _random_lattice_element(rng, space_Y, L_norm)
        mg = G.from_module(m)
        if not all(Gi.contains(G.conjugate(lift, mg)) for lift in Gi.lifts):
            report["normalizer"] += 1
        if v_gens:
            coeffs = rng.integers(-2, 3, size=len(v_gens))
            v = G.Q.reduce([sum(int(c) * g[j] for c, g in zip(coeffs, v_gens))
                            for j in range(G.Q.rank)])
            g = GroupElement(t.q, M.add(t.n, n))
            c = G.commutator(G.lift(v), g)
            if any(c.q) or not N_i.contains(c.n):
                report["commutator_V"] += 1
        report["checked"] += 1
    return report


def violations(report):
    return sum(v for k, v in report.items() if k != "checked")


def mutate_stage_submodule(st: StageData, kind: str):
    """Corrupted replacements for ``N_i`` used as negative controls."""
    from .wreath import full_submodule_like

    if kind == "full":
        return full_submodule_like(st.N_i)
    if kind == "zero":
        if st.nbar is None:
            raise ValueError("zero mutant needs a pullback stage")
        return pullback(st.fmap, FiniteX.zero(st.fmap.target))
    raise ValueError(f"unknown mutation {kind!r}")


def transversal_check(st: StageData):
    """Certificate that ``F_i`` is a finite-to-one transversal of ``N_G(K_i)``.

    ``I_i`` is checked against ``Q[n_i]`` (hence against every overgroup, in
    particular the image of ``N_G(K_i)`` in Q).  ``T_i = E_i^{Z_i}`` is a
    finite-to-one transversal of ``e_i B^{Z_i}``; it is certified against
    ``N_N(K_i)`` when the window surjects onto ``N/N_N(K_i)`` and
    ``e_i B^{Z_i}`` lies inside ``N_N(K_i) ∩ B^{Z_i}``.
    """
    G = st.K.G
    Q = G.Q
    mult_I = is_finite_to_one_transversal(st.I, power_subgroup(Q, st.n))
    if mult_I is None:
        return {"status": "failed", "reason": "I_i is not a transversal of Q[n_i]"}
    NK = st.K.normalizer_in_N()
    d = NK.index()
    if d is INFINITE:
        return {"status": "not-yet", "reason": "N_N(K_i) has infinite index"}
    space = WindowSpace(G.module, st.Z)
    W = NK.window_lattice(space)
    if W.index() != d:
        return {"status": "not-yet", "reason": f"window index {W.index()} != [N:N_N(K_i)] = {d}"}
    scaled = space.full().scaled(st.e)
    if not scaled.is_subgroup_of(W):
        return {"status": "not-yet", "reason": f"e_i = {st.e} too small for index {d}"}
    return {"status": "certified", "I_multiplicity": mult_I,
            "T_multiplicity": st.F.T_size() // d, "normalizer_index": d}


# ----------------------------------------------------------------------------
# experiment


@dataclass
class ExperimentConfig:
    G: WreathGroup
    H: GoursatTriplet
    stages: tuple
    words: list            # (label, GroupElement)
    phis: list             # (label, list of ModuleElement)
    depth: int = 128
    mode: str = "exact"    # exact | mc:N | hybrid:S:N
    seed: int = 0
    statistics: tuple = ("p_statistic", "folner", "centered", "adapted", "d_prob")
    exact_bound: int = 2 ** 24
    raw: dict = field(default_factory=dict)
    e_cap: int | None = None


def parse_mode(mode: str):
    """``exact`` -> (None, 0); ``mc:N`` -> (0, N); ``hybrid:S:N`` -> (S, N).

    The first entry is the last stage evaluated exactly (None = all).
    """
    parts = mode.split(":")
    if parts[0] == "exact" and len(parts) == 1:
        return None, 0
    if parts[0] == "mc" and len(parts) == 2:
        return 0, int(parts[1])
    if parts[0] == "hybrid" and len(parts) == 3:
        return int(parts[1]), int(parts[2])
    raise ValueError(f"bad mode {mode!r}; expected exact, mc:N or hybrid:S:N")


@dataclass
class Row:
    stage: int
    statistic: str
    label: str
    num: int
    den: int
    mode: str
    samples: int
    seed: int
    stderr: str = ""

    @property
    def value(self):
        return Fraction(self.num, self.den) if self.den else None


@dataclass
class ExperimentReport:
    rows: list
    config_hash: str
    stage_errors: dict

    def series(self, statistic, label):
        return [(r.stage, r.value) for r in self.rows
                if r.statistic == statistic and r.label == label]

    def labels(self, statistic):
        out = []
        for r in self.rows:
            if r.statistic == statistic and r.label not in out:
                out.append(r.label)
        return out


def config_hash(raw: dict) -> str:
    """SHA-256 of the canonical JSON config; the output directory is not part of it."""
    raw = {k: v for k, v in raw.items() if k != "out"}
    blob = json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def _frac_row(i, stat, label, value, mode, samples=0, seed=0, stderr=""):
    value = Fraction(value)
    return Row(i, stat, label, value.numerator, value.denominator, mode, samples, seed, stderr)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    G, H = cfg.G, cfg.H
    scheme = build_scheme(G, H, cfg.e_cap)
    exact_upto, samples = parse_mode(cfg.mode)
    enumeration = chabauty.Enumeration(G)
    rows, errors = [], {}
    lo, hi = cfg.stages
    for i in range(lo, hi + 1):
        try:
            st = stage(scheme, i)
        except (StageError, UnsupportedConfiguration) as exc:
            errors[i] = str(exc)
            rows.append(Row(i, "error", str(exc), 0, 0, "-", 0, cfg.seed))
            continue
        size = st.F.size()
        exact = (exact_upto is None or i <= exact_upto) and size <= cfg.exact_bound
        if not exact and samples < 1:
            samples_i = 10_000
        else:
            samples_i = samples
        if "p_statistic" in cfg.statistics:
            for label, g in cfg.words:
                if exact:
                    p = chabauty.p_statistic(g, st.K, H, st.F, "exact")
                    rows.append(_frac_row(i, "p_statistic", label, p, "exact"))
                else:
                    rng = stream(cfg.seed, i, "p:" + label)
                    est = chabauty.p_statistic(g, st.K, H, st.F, "mc", samples_i, rng, cfg.seed)
                    rows.append(_frac_row(i, "p_statistic", label, est.mean, "mc", samples_i,
                                          cfg.seed, repr(est.stderr)))
        if "folner" in cfg.statistics:
            for label, g in cfg.words:
                rows.append(_frac_row(i, "folner", label, chabauty.folner_defect(st.F, g),
                                      "exact"))
        if "centered" in cfg.statistics:
            for label, g in cfg.words:
                rows.append(_frac_row(i, "centered", label,
                                      chabauty.centered_defect(G.Q, st.n, g.q), "exact"))
        if "adapted" in cfg.statistics:
            for label, g in cfg.words:
                for plabel, phi in cfg.phis:
                    rows.append(_frac_row(i, "adapted", f"{label}|{plabel}",
                                          chabauty.adapted_statistic(st.F, st.I, g, phi, G),
                                          "exact"))
        if "d_prob" in cfg.statistics:
            m = chabauty.PairEnumeration.elements_needed(cfg.depth)
            tracked = enumeration.first(m)
            if exact:
                fs = [(f, 1) for f in st.F.elements()]
                mode, n_s = "exact", 0
            else:
                fs = st.F.sample_counts(stream(cfg.seed, i, "d_prob"), samples_i)
                mode, n_s = "mc", samples_i
            mu = chabauty.pattern_measure(fs, st.K, tracked, not exact, weighted=True)
            nu = chabauty.pattern_measure(fs, H, tracked, not exact, weighted=True)
            rows.append(_frac_row(i, "d_prob", f"D={cfg.depth}",
                                  chabauty.d_prob(mu, nu, cfg.depth, enumeration), mode, n_s,
                                  cfg.seed if n_s else 0))
    return ExperimentReport(rows, config_hash(cfg.raw), errors)


CSV_FIELDS = ["stage", "statistic", "label", "num", "den", "mode", "samples", "seed", "stderr",
              "config_hash"]


def report_csvs(report: ExperimentReport) -> dict:
    """One CSV body per statistic family."""
    out = {}
    families = []
    for r in report.rows:
        if r.statistic not in families:
            families.append(r.statistic)
    for fam in families:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in report.rows:
            if r.statistic == fam:
                w.writerow([r.stage, r.statistic, r.label, r.num, r.den, r.mode, r.samples,
                            r.seed, r.stderr, report.config_hash])
        out[fam] = buf.getvalue()
    return out


def write_report(report: ExperimentReport, raw_config: dict, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    files = []
    for fam, body in report_csvs(report).items():
        name = f"{fam}.csv"
        with open(os.path.join(out_dir, name), "w") as fh:
            fh.write(body)
        files.append(name)
    manifest = {"config": raw_config, "config_hash": report.config_hash, "files": files,
                "stage_errors": {str(k): v for k, v in report.stage_errors.items()}}
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return files
