"""Flat-file formats: JSON configs/summaries, CSV tables, two-section mode files."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

from .classify import ClassifierConfig
from .integrate import IntegratorConfig, Trajectory
from .model import ModelParams, State
from .modeparams import MODE_COLUMNS, SpatialModes

TRAJECTORY_HEADER = ("t", "Z_a", "Z_b", "phi_a", "phi_b", "H")
MODES_MAGIC = "# bjjmix spatial modes v1"
MODES_KEYS = ("gbar_a", "gbar_b", "gbar_ab", "deltaE_a", "deltaE_b", "f_a", "f_b")


class ConfigError(ValueError):
    pass


def fmt(v: float) -> str:
    """17 significant digits: exact float round trip."""
    return f"{v:.16e}"


def wrap_phase(phi):
    """Map to (-pi, pi]; display only, stored phases stay unwrapped."""
    w = np.mod(np.asarray(phi) + math.pi, 2 * math.pi) - math.pi
    return np.where(w == -math.pi, math.pi, w)


@dataclass
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> list[float]:
        if self.count < 1:
            raise ConfigError(f"axis {self.name}: count must be >= 1")
        if self.count == 1:
            return [float(self.start)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]


@dataclass
class SweepSpec:
    axes: list[SweepAxis]
    ratio: float | None = None  # Lambda axis: Lambda_ab = ratio * Lambda
    R: float | None = None  # K_a = R * K_b
    classify: bool = False


@dataclass
class RunConfig:
    model: ModelParams = field(default_factory=ModelParams)
    initial: State = field(default_factory=lambda: State(0.0, 0.0, 0.0, 0.0))
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    classifier: ClassifierConfig = field(default_factory=ClassifierConfig)
    sweep: SweepSpec | None = None
    output: dict = field(default_factory=lambda: {"dir": ".", "prefix": "run"})

    def to_dict(self) -> dict:
        d = {
            "model": self.model.to_dict(),
            "initial": self.initial.to_dict(),
            "integrator": self.integrator.to_dict(),
            "classifier": dict(self.classifier.__dict__),
            "output": dict(self.output),
        }
        if self.sweep is not None:
            d["sweep"] = {
                "axes": [a.__dict__.copy() for a in self.sweep.axes],
                "ratio": self.sweep.ratio, "R": self.sweep.R, "classify": self.sweep.classify,
            }
        return d


AXIS_NAMES = ({f.name for f in fields(ModelParams)} - {"tunneling"}) | {f.name for f in fields(State)} | {"Lambda"}


def _model_from(d: dict) -> ModelParams:
    d = dict(d)
    lam, ratio = d.pop("Lambda", None), d.pop("ratio", None)
    if lam is not None:
        d.setdefault("Lambda_a", lam)
        d.setdefault("Lambda_b", lam)
        if ratio is not None:
            d.setdefault("Lambda_ab", ratio * lam)
    elif ratio is not None and "Lambda_a" in d:
        d.setdefault("Lambda_ab", ratio * d["Lambda_a"])
    return ModelParams(**d)


def config_from_dict(d: dict) -> RunConfig:
    unknown = set(d) - {"model", "initial", "integrator", "classifier", "sweep", "output"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    try:
        cfg = RunConfig(
            model=_model_from(d.get("model", {})),
            initial=State(**{"Z_a": 0.0, "Z_b": 0.0, "phi_a": 0.0, "phi_b": 0.0, **d.get("initial", {})}),
            integrator=IntegratorConfig(**d.get("integrator", {})),
            classifier=ClassifierConfig(**d.get("classifier", {})),
            output={"dir": ".", "prefix": "run", **d.get("output", {})},
        )
        if "sweep" in d and d["sweep"] is not None:
            s = d["sweep"]
            axes = [SweepAxis(a["name"], float(a["start"]), float(a["stop"]), int(a["count"])) for a in s["axes"]]
            for a in axes:
                if a.name not in AXIS_NAMES:
                    raise ConfigError(f"sweep axis {a.name!r} is not a model or state field")
                a.values()
            cfg.sweep = SweepSpec(axes, s.get("ratio"), s.get("R"), bool(s.get("classify", False)))
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as e:
        raise ConfigError(str(e)) from e
    return cfg


def load_config(path) -> RunConfig:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    return config_from_dict(d)


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_trajectory(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER)
        for t, y, h in zip(traj.times, traj.states, traj.energies):
            w.writerow([fmt(t), *map(fmt, y), fmt(h)])


def read_trajectory(path, params: ModelParams) -> Trajectory:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = tuple(next(r))
        if header != TRAJECTORY_HEADER:
            raise ConfigError(f"{path}: unexpected header {header}")
        rows = np.array([[float(v) for v in row] for row in r if row])
    return Trajectory(rows[:, 0], rows[:, 1:5], rows[:, 5], params)


def write_modes(m: SpatialModes, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(MODES_MAGIC + "\n")
        for k in MODES_KEYS:
            fh.write(f"{k}={getattr(m, k)!r}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("x",) + MODE_COLUMNS)
        for row in zip(m.x, *(getattr(m, c) for c in MODE_COLUMNS)):
            w.writerow([repr(float(v)) for v in row])


def read_modes(path) -> SpatialModes:
    lines = Path(path).read_text().splitlines()
    meta, i = {}, 0
    if lines and lines[0].startswith("#"):
        i = 1
    while i < len(lines) and "=" in lines[i]:
        k, v = lines[i].split("=", 1)
        if k.strip() not in MODES_KEYS:
            raise ConfigError(f"{path}: unknown header key {k!r}")
        meta[k.strip()] = float(v)
        i += 1
    if i >= len(lines) or tuple(c.strip() for c in lines[i].split(",")) != ("x",) + MODE_COLUMNS:
        raise ConfigError(f"{path}: expected column header x,{','.join(MODE_COLUMNS)}")
    try:
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[i + 1:] if ln.strip()])
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e
    if data.ndim != 2 or data.shape[1] != 5:
        raise ConfigError(f"{path}: expected 5 columns")
    return SpatialModes(data[:, 0], data[:, 1], data[:, 2], data[:, 3], data[:, 4], **meta)
