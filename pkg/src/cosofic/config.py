"""JSON run configurations for the experiment harness."""

from __future__ import annotations

import json

import jsonschema

from .perm_module import UnsupportedSubmodule, submodule_from_json
from .pipeline import ExperimentConfig, exact_bound, parse_mode
from .wreath import GoursatTriplet, WreathGroup


class ConfigError(ValueError):
    pass


_ABELIAN = {
    "type": "object",
    "properties": {
        "free_rank": {"type": "integer", "minimum": 0},
        "torsion": {"type": "array", "items": {"type": "integer", "minimum": 2}},
        "labels": {"type": "array", "items": {"type": "string"}},
    },
    "additionalProperties": False,
}

_VECTOR = {"type": "array", "items": {"type": "integer"}}

_MODULE_ELEMENT = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {"orbit": {"type": "integer", "minimum": 0}, "coset": _VECTOR,
                       "value": _VECTOR},
        "required": ["coset", "value"],
        "additionalProperties": False,
    },
}

_SUBMODULE = {
    "type": "object",
    "properties": {
        "type": {"enum": ["laurent", "finite", "pullback"]},
        "p": {"type": "integer", "minimum": 2},
        "coeffs": _VECTOR,
        "V": {"type": "array", "items": _VECTOR},
        "gens": {"type": "array", "items": _MODULE_ELEMENT},
    },
    "required": ["type"],
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "group": {
            "oneOf": [
                {"type": "object",
                 "properties": {"preset": {"const": "lamplighter"},
                                "p": {"type": "integer", "minimum": 2}},
                 "required": ["preset"], "additionalProperties": False},
                {"type": "object",
                 "properties": {"preset": {"const": "finite_lamplighter"},
                                "k": {"type": "integer", "minimum": 1},
                                "p": {"type": "integer", "minimum": 2}},
                 "required": ["preset", "k"], "additionalProperties": False},
                {"type": "object",
                 "properties": {"Q": _ABELIAN, "B": _ABELIAN,
                                "X": {"type": "object",
                                      "properties": {"stabilizers": {
                                          "type": "array",
                                          "items": {"type": "array", "items": _VECTOR}},
                                          "labels": {"type": "array"}},
                                      "additionalProperties": False}},
                 "required": ["Q", "B"], "additionalProperties": False},
            ]
        },
        "subgroup": {
            "type": "object",
            "properties": {
                "Q_H": {"type": "array", "items": _VECTOR},
                "N_H": _SUBMODULE,
                "alpha": {"type": "array", "items": {
                    "type": "object",
                    "properties": {"gen": _VECTOR, "a": _MODULE_ELEMENT},
                    "required": ["gen"], "additionalProperties": False}},
            },
            "required": ["N_H"],
            "additionalProperties": False,
        },
        "stages": {"type": "array", "items": {"type": "integer", "minimum": 1},
                   "minItems": 2, "maxItems": 2},
        "words": {"type": "array", "items": {
            "type": "object",
            "properties": {"label": {"type": "string"}, "q": _VECTOR, "n": _MODULE_ELEMENT},
            "required": ["label"], "additionalProperties": False}},
        "phis": {"type": "array", "items": {
            "type": "object",
            "properties": {"label": {"type": "string"},
                           "elements": {"type": "array", "items": _MODULE_ELEMENT}},
            "required": ["label", "elements"], "additionalProperties": False}},
        "statistics": {"type": "array", "items": {
            "enum": ["p_statistic", "folner", "centered", "adapted", "d_prob"]}},
        "depth": {"type": "integer", "minimum": 1},
        "mode": {"type": "string", "pattern": r"^(exact|mc:[0-9]+|hybrid:[0-9]+:[0-9]+)$"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
        "exact_bound": {"type": "integer", "minimum": 1},
        "e_cap": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
    },
    "required": ["group", "subgroup", "stages"],
    "additionalProperties": False,
}


def validate_raw(raw):
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"schema error at {path}: {exc.message}") from None


def group_from_json(data) -> WreathGroup:
    preset = data.get("preset")
    if preset == "lamplighter":
        return WreathGroup.lamplighter(int(data.get("p", 2)))
    if preset == "finite_lamplighter":
        return WreathGroup.finite_lamplighter(int(data["k"]), int(data.get("p", 2)))
    return WreathGroup.from_json(data)


def triplet_from_json(G, data) -> GoursatTriplet:
    M = G.module
    try:
        N_H = submodule_from_json(M, data["N_H"])
    except (UnsupportedSubmodule, KeyError) as exc:
        raise ConfigError(f"bad N_H: {exc}") from None
    pairs = [(tuple(d["gen"]), M.from_json(d.get("a", []))) for d in data.get("alpha", [])]
    listed = {G.Q.reduce(q) for q, _ in pairs}
    for q in data.get("Q_H", []):
        if G.Q.reduce(q) not in listed:
            pairs.append((tuple(q), M.zero()))
    H = GoursatTriplet.from_generators(G, pairs, N_H)
    problems = H.validate()
    if problems:
        raise ConfigError("subgroup is not a valid triplet: " + "; ".join(problems))
    return H


def load_config(raw: dict, overrides=None) -> ExperimentConfig:
    """Validate ``raw`` (after applying CLI overrides) and build the config."""
    raw = dict(raw)
    for k, v in (overrides or {}).items():
        if v is not None:
            raw[k] = v
    validate_raw(raw)
    try:
        G = group_from_json(raw["group"])
        H = triplet_from_json(G, raw["subgroup"])
        M = G.module
        words = [(w["label"], G.element(tuple(w.get("q", G.Q.zero())), M.from_json(w.get("n", []))))
                 for w in raw.get("words", [])]
        phis = [(p["label"], [M.from_json(e) for e in p["elements"]]) for p in raw.get("phis", [])]
        mode = raw.get("mode", "exact")
        parse_mode(mode)
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    lo, hi = raw["stages"]
    if lo > hi:
        raise ConfigError("stages must be [first, last] with first <= last")
    cfg = ExperimentConfig(
        G, H, (lo, hi), words, phis,
        depth=raw.get("depth", 128), mode=mode, seed=raw.get("seed", 0),
        exact_bound=raw.get("exact_bound", exact_bound()), raw=raw, e_cap=raw.get("e_cap"))
    if "statistics" in raw:
        cfg.statistics = tuple(raw["statistics"])
    return cfg


def read_config(path, overrides=None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return load_config(raw, overrides)
