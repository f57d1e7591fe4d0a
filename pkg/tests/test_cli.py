import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cosofic.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def small_config(tmp_path, name="flagship.json", stages=(1, 3), **extra):
    raw = json.loads((CONFIGS / name).read_text())
    raw["stages"] = list(stages)
    raw.update(extra)
    p = tmp_path / name
    p.write_text(json.dumps(raw))
    return p


def test_goursat_audit_ok(tmp_path, capsys):
    assert main(["goursat-audit", "--k", "1", "2", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "MISMATCH" not in out and out.count("match") == 2
    data = json.loads((tmp_path / "goursat_audit.json").read_text())
    assert [r["subgroups"] for r in data] == [2, 10]


def test_goursat_audit_mutate_fails(capsys):
    assert main(["goursat-audit", "--k", "2", "--mutate"]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_goursat_audit_oversize(monkeypatch, capsys):
    monkeypatch.setenv("COSOFIC_AUDIT_BOUND", "10")
    assert main(["goursat-audit", "--k", "3"]) == 2


def test_weiss_run_is_byte_reproducible(tmp_path, capsys):
    cfg = small_config(tmp_path, depth=27)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["weiss-run", "--config", str(cfg), "--out", str(a), "--verify", "200"]) == 0
    assert main(["weiss-run", "--config", str(cfg), "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    assert "p_statistic.csv" in names and "manifest.json" in names
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()
    rows = list(csv.DictReader((a / "p_statistic.csv").open()))
    assert {r["label"] for r in rows} == {"t", "b", "t2b"}
    out = capsys.readouterr().out
    assert "0 violations" in out


def test_weiss_run_overrides_change_hash(tmp_path):
    cfg = small_config(tmp_path, stages=(1, 2), depth=9)
    a, b = tmp_path / "a", tmp_path / "b"
    main(["weiss-run", "--config", str(cfg), "--out", str(a)])
    main(["weiss-run", "--config", str(cfg), "--out", str(b), "--seed", "5"])
    ha = json.loads((a / "manifest.json").read_text())["config_hash"]
    hb = json.loads((b / "manifest.json").read_text())["config_hash"]
    assert ha != hb


def test_weiss_run_config_errors(tmp_path, capsys):
    assert main(["weiss-run", "--config", str(tmp_path / "nope.json")]) == 2
    bad = small_config(tmp_path, mode="warp")
    assert main(["weiss-run", "--config", str(bad)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_weiss_run_hypothesis_violation(tmp_path):
    raw = {"group": {"preset": "lamplighter", "p": 2},
           "subgroup": {"N_H": {"type": "laurent", "p": 2, "coeffs": []},
                        "alpha": [{"gen": [1]}]},
           "stages": [1, 2], "words": [{"label": "t", "q": [1]}]}
    p = tmp_path / "h.json"
    p.write_text(json.dumps(raw))
    assert main(["weiss-run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


def test_stability_demo_cli(tmp_path):
    out = tmp_path / "s"
    assert main(["stability-demo", "--k", "4", "--j-max", "6", "--perturbations", "1",
                 "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n"] == 64 and summary["distances"]["t"] == "1/32" and summary["ok"]
    rows = list(csv.DictReader((out / "relation_defects.csv").open()))
    assert len(rows) == 12
    assert all(r["defect_num"] == "0" for r in rows if r["pair"] == "exact")
    assert main(["stability-demo", "--k", "20", "--out", str(out)]) == 2


def test_metrics_selftest_cli(capsys):
    assert main(["metrics-selftest", "--cases", "20"]) == 0
    assert "0 failures" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cosofic", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0
    for cmd in ("goursat-audit", "weiss-run", "stability-demo", "metrics-selftest"):
        assert cmd in res.stdout


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
