"""JSON experiment configuration: parsing, defaults and validation.

Validation covers everything that can be checked without building the row
laws, so a bad field is reported by name before any heavy computation.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

from .errors import ConfigInvalid
from .lattice_dist import LatticeDistribution, detect_span, parse_value

DEFAULT_U_GRID = {"min": -5.0, "max": 5.0, "count": 201}
DEFAULT_X_GRID = {"min": -5.0, "max": 20.0, "count": 101}
DEFAULT_MC = {"R": 10000, "seed": 0, "n": None, "cap": 10**6}
DEFAULT_LARGEDEV = {"n": [100, 400], "beta": [0.55, 0.6, 0.65, 0.7, 0.75]}


@dataclass(frozen=True)
class ExperimentConfig:
    distribution: list
    lam: float
    tau: float | str = "auto"
    delta_targets: list = field(default_factory=lambda: [0.0])
    epsilon: float = 0.02
    n_max: int = 200
    u_grid: dict = field(default_factory=lambda: dict(DEFAULT_U_GRID))
    x_grid: dict = field(default_factory=lambda: dict(DEFAULT_X_GRID))
    mc: dict = field(default_factory=lambda: dict(DEFAULT_MC))
    largedev: dict = field(default_factory=lambda: dict(DEFAULT_LARGEDEV))
    limit_pairs: list | None = None
    output: str = "out"

    def to_json_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2)

    @property
    def sha256(self) -> str:
        canon = json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def lattice_distribution(self) -> LatticeDistribution:
        return detect_span((a["value"], a["prob"]) for a in self.distribution)


def _number(raw: dict, key: str, path: str | None = None, integer: bool = False):
    path = path or key
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigInvalid(f"{path} must be a number, got {v!r}", path)
    if integer and (not float(v).is_integer()):
        raise ConfigInvalid(f"{path} must be an integer, got {v!r}", path)
    if not math.isfinite(v):
        raise ConfigInvalid(f"{path} must be finite", path)
    return int(v) if integer else float(v)


def _grid(raw: dict, key: str, default: dict) -> dict:
    g = dict(default)
    if key in raw:
        if not isinstance(raw[key], dict):
            raise ConfigInvalid(f"{key} must be an object with min, max, count", key)
        unknown = set(raw[key]) - {"min", "max", "count"}
        if unknown:
            raise ConfigInvalid(f"{key} has unknown keys {sorted(unknown)}", key)
        g.update(raw[key])
    out = {
        "min": _number(g, "min", f"{key}.min"),
        "max": _number(g, "max", f"{key}.max"),
        "count": _number(g, "count", f"{key}.count", integer=True),
    }
    if out["count"] < 1 or out["max"] < out["min"]:
        raise ConfigInvalid(f"{key} needs count >= 1 and max >= min", key)
    return out


def _atoms(raw) -> list:
    if not isinstance(raw, list) or len(raw) < 2:
        raise ConfigInvalid("distribution must be a list of at least two atoms", "distribution")
    atoms = []
    for i, a in enumerate(raw):
        path = f"distribution[{i}]"
        if not isinstance(a, dict):
            raise ConfigInvalid(f"{path} must be an object with value and prob", path)
        for key in ("value", "prob"):
            if key not in a:
                raise ConfigInvalid(f"{path} is missing '{key}'", f"{path}.{key}")
        try:
            parse_value(a["value"])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigInvalid(f"{path}.value: {exc}", f"{path}.value") from None
        prob = _number(a, "prob", f"{path}.prob")
        if prob <= 0:
            raise ConfigInvalid(f"{path}.prob must be positive", f"{path}.prob")
        # keep the user's spelling so rational strings survive the round trip
        atoms.append({"value": a["value"], "prob": prob})
    return atoms


KNOWN = {
    "distribution", "lambda", "tau", "delta_targets", "epsilon", "n_max", "u_grid",
    "x_grid", "mc", "largedev", "limit_pairs", "output",
}


def parse_config(raw: dict[str, Any]) -> ExperimentConfig:
    """Validate a decoded JSON object and fill in defaults."""
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a JSON object")
    unknown = set(raw) - KNOWN
    if unknown:
        raise ConfigInvalid(f"unknown config keys {sorted(unknown)}", sorted(unknown)[0])
    for key in ("distribution", "lambda"):
        if key not in raw:
            raise ConfigInvalid(f"missing required field '{key}'", key)
    atoms = _atoms(raw["distribution"])
    try:
        d = detect_span((a["value"], a["prob"]) for a in atoms)
    except ValueError as exc:
        raise ConfigInvalid(f"distribution: {exc}", "distribution") from None
    h = d.h

    lam = _number(raw, "lambda")
    if lam <= 0:
        raise ConfigInvalid("lambda must be positive", "lambda")

    tau = raw.get("tau", "auto")
    if tau != "auto":
        tau = _number(raw, "tau")
        if tau <= 0:
            raise ConfigInvalid("tau must be positive or \"auto\"", "tau")

    targets = raw.get("delta_targets", [0.0])
    if not isinstance(targets, list) or not targets:
        raise ConfigInvalid("delta_targets must be a nonempty list", "delta_targets")
    dt = []
    for i, t in enumerate(targets):
        v = _number({"t": t}, "t", f"delta_targets[{i}]")
        if not (0.0 <= v <= h):
            raise ConfigInvalid(f"delta_targets[{i}]={v!r} outside [0, h={h!r}]", f"delta_targets[{i}]")
        dt.append(v)

    eps = _number(raw, "epsilon") if "epsilon" in raw else 0.02
    if eps <= 0:
        raise ConfigInvalid("epsilon must be positive", "epsilon")
    n_max = _number(raw, "n_max", integer=True) if "n_max" in raw else 200
    if n_max < 1:
        raise ConfigInvalid("n_max must be a positive integer", "n_max")

    mc = dict(DEFAULT_MC)
    if "mc" in raw:
        if not isinstance(raw["mc"], dict) or set(raw["mc"]) - set(DEFAULT_MC):
            raise ConfigInvalid("mc must be an object with keys R, seed, n, cap", "mc")
        mc.update(raw["mc"])
    mc = {
        "R": _number(mc, "R", "mc.R", integer=True),
        "seed": _number(mc, "seed", "mc.seed", integer=True),
        "n": None if mc["n"] is None else _number(mc, "n", "mc.n", integer=True),
        "cap": _number(mc, "cap", "mc.cap", integer=True),
    }
    if mc["R"] < 1 or mc["cap"] < 1 or mc["seed"] < 0 or (mc["n"] is not None and mc["n"] < 1):
        raise ConfigInvalid("mc.R, mc.cap, mc.n must be positive and mc.seed nonnegative", "mc")

    ld = dict(DEFAULT_LARGEDEV)
    if "largedev" in raw:
        if not isinstance(raw["largedev"], dict) or set(raw["largedev"]) - set(DEFAULT_LARGEDEV):
            raise ConfigInvalid("largedev must be an object with keys n, beta", "largedev")
        ld.update(raw["largedev"])
    ld = {
        "n": [_number({"v": v}, "v", f"largedev.n[{i}]", integer=True) for i, v in enumerate(ld["n"])],
        "beta": [_number({"v": v}, "v", f"largedev.beta[{i}]") for i, v in enumerate(ld["beta"])],
    }

    pairs = raw.get("limit_pairs")
    if pairs is not None:
        if not isinstance(pairs, list):
            raise ConfigInvalid("limit_pairs must be a list of {alpha, delta}", "limit_pairs")
        checked = []
        for i, pr in enumerate(pairs):
            path = f"limit_pairs[{i}]"
            if not isinstance(pr, dict) or set(pr) != {"alpha", "delta"}:
                raise ConfigInvalid(f"{path} must have exactly alpha and delta", path)
            a = _number(pr, "alpha", f"{path}.alpha")
            dl = _number(pr, "delta", f"{path}.delta")
            if not (0 < a < 2):
                raise ConfigInvalid(f"{path}.alpha outside (0, 2)", f"{path}.alpha")
            if not (0 <= dl <= h):
                raise ConfigInvalid(f"{path}.delta outside [0, h]", f"{path}.delta")
            checked.append({"alpha": a, "delta": dl})
        pairs = checked

    output = raw.get("output", "out")
    if not isinstance(output, str) or not output:
        raise ConfigInvalid("output must be a nonempty path string", "output")

    return ExperimentConfig(
        distribution=atoms,
        lam=lam,
        tau=tau,
        delta_targets=dt,
        epsilon=eps,
        n_max=n_max,
        u_grid=_grid(raw, "u_grid", DEFAULT_U_GRID),
        x_grid=_grid(raw, "x_grid", DEFAULT_X_GRID),
        mc=mc,
        largedev=ld,
        limit_pairs=pairs,
        output=output,
    )


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigInvalid(f"config file {path!r} not found", "config") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}", "config") from None
    return parse_config(raw)


__all__ = ["ExperimentConfig", "parse_config", "load_config"]
