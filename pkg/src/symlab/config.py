"""Experiment configuration files (YAML; JSON is a subset and loads the same way).

    input: |
      rep=pointset dim=2
      point -1 0
      point 1 0
    operator: minkowski
    family: [90]            # 2-D lines by angle in degrees, or axis names: [z, x]
    schedule: cyclic        # cyclic | "random seed=7" | [0, 1, 0]
    max_steps: 30
    tol: 1.0e-6
    snap: null
    outputs:
      csv: run.csv
      svg: "frames/step_{step}.svg"
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .core import Subspace
from .sequences import OPERATORS, ScheduleSpec
from .sets.textio import SetFormatError, parse_set

KEYS = {"input", "operator", "family", "schedule", "max_steps", "tol", "snap", "outputs", "seed"}


class ConfigError(ValueError):
    def __init__(self, msg: str, where: str | None = None):
        super().__init__(f"{where}: {msg}" if where else msg)
        self.where = where


@dataclass
class Outputs:
    csv: str | None = None
    svg: str | None = None


@dataclass
class ExperimentConfig:
    input: object
    spec: ScheduleSpec
    snap: float | None = None
    outputs: Outputs = field(default_factory=Outputs)


def parse_subspace(entry, n: int, where: str) -> Subspace:
    """Degrees for planar lines; axis letters (``x``, ``yz``) or ``o`` for the origin."""
    if isinstance(entry, bool):
        raise ConfigError("expected an angle or axis names", where)
    if isinstance(entry, (int, float)):
        if n != 2:
            raise ConfigError("angles describe lines in the plane only", where)
        return Subspace.line(math.radians(float(entry)))
    if isinstance(entry, dict) and set(entry) == {"angle"}:
        return parse_subspace(float(entry["angle"]), n, where)
    if isinstance(entry, str):
        name = entry.strip().lower()
        if name in ("o", "origin"):
            return Subspace.origin(n)
        axes = []
        for ch in name:
            if ch not in "xyz"[:n]:
                raise ConfigError(f"unknown axis '{ch}' for dimension {n}", where)
            axes.append("xyz".index(ch))
        try:
            return Subspace.coordinate(n, *axes)
        except ValueError as exc:
            raise ConfigError(str(exc), where) from None
    raise ConfigError(f"cannot read subspace {entry!r}", where)


def _schedule(raw, where: str):
    if isinstance(raw, list):
        if not all(isinstance(i, int) and not isinstance(i, bool) for i in raw):
            raise ConfigError("explicit schedules are lists of family indices", where)
        return raw, None
    if not isinstance(raw, str):
        raise ConfigError("schedule must be 'cyclic', 'random seed=<n>' or a list", where)
    tok = raw.split()
    if tok == ["cyclic"]:
        return "cyclic", None
    if tok and tok[0] == "random":
        seed = None
        for t in tok[1:]:
            k, _, v = t.partition("=")
            if k != "seed" or not v.isdigit():
                raise ConfigError(f"bad schedule option '{t}'", where)
            seed = int(v)
        if seed is None or seed >= 2 ** 64:
            raise ConfigError("random schedules need seed=<u64>", where)
        return "random", seed
    raise ConfigError(f"unknown schedule '{raw}'", where)


def _load_input(raw, base: Path, snap):
    if hasattr(raw, "ambient_dim"):  # an already built set
        return raw
    if not isinstance(raw, str):
        raise ConfigError("input must be a set literal or a file path", "input")
    text = raw if "rep=" in raw else None
    if text is None:
        path = (base / raw).resolve()
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc.strerror}", "input") from None
    try:
        return parse_set(text, snap=snap)
    except SetFormatError as exc:
        raise ConfigError(str(exc), "input") from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}" if mark is not None else None
        raise ConfigError(f"unparseable config ({getattr(exc, 'problem', exc)})", where) from None
    return config_from_dict(raw, path.parent)


def config_from_dict(raw, base: Path = Path(".")) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    extra = set(raw) - KEYS
    if extra:
        raise ConfigError(f"unknown field(s) {sorted(extra)}")
    for k in ("input", "family"):
        if k not in raw:
            raise ConfigError("required field missing", k)
    snap = raw.get("snap")
    if snap is not None and not (isinstance(snap, (int, float)) and snap > 0):
        raise ConfigError("snap must be a positive number or null", "snap")
    A = _load_input(raw["input"], base, snap)
    n = A.ambient_dim
    fam = raw["family"]
    if not isinstance(fam, list) or not fam:
        raise ConfigError("family must be a nonempty list", "family")
    family = [parse_subspace(e, n, f"family[{i}]") for i, e in enumerate(fam)]
    op = raw.get("operator", "minkowski")
    if op not in OPERATORS:
        raise ConfigError(f"must be one of {list(OPERATORS)}", "operator")
    schedule, seed = _schedule(raw.get("schedule", "cyclic"), "schedule")
    if seed is None and raw.get("seed") is not None:
        seed = raw["seed"]
    try:
        spec = ScheduleSpec(family, schedule, max_steps=int(raw.get("max_steps", 40)),
                            tol=float(raw.get("tol", 1e-6)), operator=op, seed=seed)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "schedule") from None
    out = raw.get("outputs") or {}
    if not isinstance(out, dict) or set(out) - {"csv", "svg"}:
        raise ConfigError("outputs takes 'csv' and 'svg'", "outputs")
    svg = out.get("svg")
    if svg is not None and "{step}" not in svg:
        raise ConfigError("svg pattern needs a {step} placeholder", "outputs.svg")
    # output paths, like input paths, are relative to the config file
    csv_path = out.get("csv")
    csv_path = None if csv_path is None else str(base / csv_path)
    svg = None if svg is None else str(base / svg)
    return ExperimentConfig(A, spec, snap, Outputs(csv_path, svg))
