"""Command-line entry points.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import brute, pipeline, selftest
from .config import ConfigError, read_config
from .perm_stability import stability_demo

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _frac(x):
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


def _write_json(path, data):
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_goursat_audit(args):
    reports = []
    try:
        for k in args.k:
            reports.append(brute.goursat_audit(k, args.p, mutate=args.mutate))
        if args.transversals:
            tr = brute.transversal_audit(args.transversal_k, args.p)
    except brute.OversizeGroup as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    ok = True
    print(f"{'k':>3} {'|G|':>6} {'subgroups':>10} {'triplets':>9} {'rejected':>9}  result")
    for r in reports:
        ok &= r["ok"]
        print(f"{r['k']:>3} {r['order']:>6} {r['subgroups']:>10} {r['triplets']:>9} "
              f"{r['rejected_candidates']:>9}  {'match' if r['ok'] else 'MISMATCH'}")
        for p in r["problems"][:5]:
            print(f"    {p}")
    if args.transversals:
        ok &= tr["ok"]
        print(f"transversal audit: {tr['transversals_checked']} transversals over "
              f"{tr['subgroups']} subgroups: {'match' if tr['ok'] else 'MISMATCH'}")
        reports.append({"transversal_audit": tr})
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _write_json(os.path.join(args.out, "goursat_audit.json"), reports)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_weiss_run(args):
    overrides = {"seed": args.seed, "depth": args.depth, "mode": args.mode}
    try:
        cfg = read_config(args.config, overrides)
        scheme = pipeline.build_scheme(cfg.G, cfg.H, cfg.e_cap)
    except (ConfigError, pipeline.HypothesisViolation, pipeline.UnsupportedConfiguration,
            ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    failed = False
    if args.verify:
        lo, hi = cfg.stages
        for i in range(lo, hi + 1):
            try:
                st = pipeline.stage(scheme, i)
            except (pipeline.StageError, pipeline.UnsupportedConfiguration):
                continue
            rep = pipeline.verify_stage(st, cfg.H, args.verify, cfg.seed)
            bad = pipeline.violations(rep)
            print(f"verify stage {i}: {rep['checked']} samples, {bad} violations")
            failed |= bad > 0
    report = pipeline.run_experiment(cfg)
    out = args.out or cfg.raw.get("out") or "weiss_out"
    files = pipeline.write_report(report, cfg.raw, out)
    _print_summary(report)
    for i, msg in sorted(report.stage_errors.items()):
        print(f"stage {i} error: {msg}")
    print(f"wrote {', '.join(files)} and manifest.json to {out}")
    return EXIT_FAIL if failed else EXIT_OK


def _print_summary(report):
    stages = sorted({r.stage for r in report.rows})
    series = []
    for stat in ("p_statistic", "folner", "centered", "adapted", "d_prob"):
        for label in report.labels(stat):
            series.append((f"{stat}[{label}]", dict(report.series(stat, label))))
    width = max([len(name) for name, _ in series] + [10])
    print("stage".ljust(width) + "".join(f"{i:>14}" for i in stages))
    for name, values in series:
        cells = []
        for i in stages:
            v = values.get(i)
            cells.append("-" if v is None else (_frac(v) if len(_frac(v)) <= 12 else f"{float(v):.6g}"))
        print(name.ljust(width) + "".join(f"{c:>14}" for c in cells))


def cmd_stability_demo(args):
    try:
        rep = stability_demo(args.k, args.j_max, args.perturbations, args.seed, args.target)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = rep["rows"]
    ok = rep["exact_max_defect"] == 0 and all(
        r["perturbed_defect"] <= r["lipschitz_bound"] for r in rows)
    print(f"n = {rep['n']}, perturbed {rep['target']} by {len(rep['swaps'])} transposition(s)")
    for name, d in sorted(rep["distances"].items()):
        print(f"d_n({name}, perturbed {name}) = {_frac(d)}")
    print(f"{'j':>3} {'exact':>8} {'perturbed':>10} {'lipschitz':>10} {'4c/n':>8}")
    for r in rows:
        print(f"{r['j']:>3} {_frac(r['exact_defect']):>8} {_frac(r['perturbed_defect']):>10} "
              f"{_frac(r['lipschitz_bound']):>10} {_frac(r['transposition_bound']):>8}")
    out = args.out or "stability_out"
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "relation_defects.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["word", "pair", "defect_num", "defect_den", "bound_num", "bound_den"])
        for r in rows:
            word = f"[b,b^(t^{r['j']})]"
            w.writerow([word, "exact", r["exact_defect"].numerator,
                        r["exact_defect"].denominator, "", ""])
            w.writerow([word, "perturbed", r["perturbed_defect"].numerator,
                        r["perturbed_defect"].denominator, r["lipschitz_bound"].numerator,
                        r["lipschitz_bound"].denominator])
    summary = {"k": rep["k"], "n": rep["n"], "seed": args.seed, "target": rep["target"],
               "swaps": rep["swaps"], "distances": {k: _frac(v) for k, v in rep["distances"].items()},
               "exact_max_defect": _frac(rep["exact_max_defect"]),
               "perturbed_max_defect": _frac(rep["perturbed_max_defect"]),
               "permutations": {name: list(p) for name, p in rep["exact"].perms.items()},
               "ok": ok}
    _write_json(os.path.join(out, "summary.json"), summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_metrics_selftest(args):
    res = selftest.run_selftest(args.seed, args.cases)
    ok = True
    for name, (cases, fails) in res.items():
        ok &= fails == 0
        print(f"{name:<22} {cases:>7} cases  {fails} failures")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="cosofic", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("goursat-audit", help="brute-force subgroups vs Goursat triplets")
    p.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--transversals", action="store_true",
                   help="also check F*K on every transversal of N_G(K)")
    p.add_argument("--transversal-k", type=int, default=3)
    p.add_argument("--mutate", action="store_true", help="corrupt membership (negative control)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_goursat_audit)

    p = sub.add_parser("weiss-run", help="run the convergence experiment from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--mode")
    p.add_argument("--out")
    p.add_argument("--verify", type=int, default=0, metavar="SAMPLES",
                   help="run the stage checks with this many samples first")
    p.set_defaults(func=cmd_weiss_run)

    p = sub.add_parser("stability-demo", help="exact permutation witness and perturbed defects")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--j-max", type=int, default=12)
    p.add_argument("--perturbations", type=int, default=0)
    p.add_argument("--target", choices=["b", "t"], default="t")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stability_demo)

    p = sub.add_parser("metrics-selftest", help="metric axioms and commutator identities")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=500)
    p.set_defaults(func=cmd_metrics_selftest)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
