import copy
import json

import pytest

from cosofic.config import ConfigError, load_config, read_config
from cosofic.wreath import WreathGroup

BASE = {
    "group": {"preset": "lamplighter", "p": 2},
    "subgroup": {"N_H": {"type": "laurent", "p": 2, "coeffs": [1, 1]}},
    "stages": [1, 3],
    "words": [{"label": "t", "q": [1]}],
}


def cfg_with(**changes):
    raw = copy.deepcopy(BASE)
    raw.update(changes)
    return raw


def test_defaults_and_overrides():
    cfg = load_config(BASE)
    assert cfg.G == WreathGroup.lamplighter(2)
    assert cfg.stages == (1, 3) and cfg.mode == "exact" and cfg.seed == 0
    cfg = load_config(BASE, {"seed": 7, "mode": "mc:100", "depth": None})
    assert cfg.seed == 7 and cfg.mode == "mc:100" and cfg.depth == 128


def test_presets_and_explicit_groups():
    cfg = load_config(cfg_with(group={"preset": "finite_lamplighter", "k": 3, "p": 2},
                               subgroup={"N_H": {"type": "finite", "gens": []}},
                               words=[{"label": "t", "q": [1]}]))
    assert cfg.G == WreathGroup.finite_lamplighter(3)


@pytest.mark.parametrize("bad", [
    {"stages": [3, 1]},
    {"stages": [0, 2]},
    {"mode": "fast"},
    {"mode": "hybrid:2"},
    {"statistics": ["p_statistic", "nonsense"]},
    {"group": {"preset": "heisenberg"}},
    {"words": [{"label": "t", "q": [1, 2]}]},
    {"seed": -1},
])
def test_rejections(bad):
    with pytest.raises(ConfigError):
        load_config(cfg_with(**bad))


def test_invalid_subgroup_rejected():
    # torsion relation fails: a + a^q = (1, 1) is not in N_H = 0
    raw = {
        "group": {"Q": {"torsion": [2]}, "B": {"torsion": [2]}},
        "subgroup": {"N_H": {"type": "finite", "gens": []},
                     "alpha": [{"gen": [1], "a": [{"coset": [0], "value": [1]}]}]},
        "stages": [1, 1],
        "words": [{"label": "g", "q": [1]}],
    }
    with pytest.raises(ConfigError, match="not a valid triplet"):
        load_config(raw)


def test_read_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(BASE))
    assert read_config(p).stages == (1, 3)
    with pytest.raises(ConfigError):
        read_config(tmp_path / "missing.json")
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        read_config(p)
