"""Regime labels for trajectories: phase class per species plus a trapping verdict."""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

import numpy as np

from .equilibria import Mode, NoTransition, normal_mode_frequencies
from .integrate import IntegratorConfig, Trajectory, integrate
from .model import ModelParams, State


class PhaseClass(str, enum.Enum):
    ZERO = "ZeroPhase"
    PI = "PiPhase"
    RUNNING = "RunningPhase"


class Trapping(str, enum.Enum):
    OSCILLATORY = "Oscillatory"
    MQST_SEPARATED = "MQST_Separated"
    MQST_COEXISTING = "MQST_Coexisting"
    SWAPPING_AVOIDING = "Swapping_Avoiding"
    SWAPPING_CHASING = "Swapping_Chasing"

    @property
    def family(self) -> str:
        return self.value.split("_")[0]


@dataclass(frozen=True)
class ClassifierConfig:
    min_duration: float = 100.0
    transient: float = 0.1
    trap_fraction: float = 0.1  # of peak |Z_l| over the window
    corr_fraction: float = 0.2  # of rms(Z_a) * rms(Z_b)
    phi_tol: float = 0.3
    slope_threshold: float = 0.05
    r2_min: float = 0.99


@dataclass(frozen=True)
class RegimeLabel:
    phase_class: tuple[PhaseClass, PhaseClass]
    trapping: Trapping
    mean_Z_a: float
    mean_Z_b: float
    corr_ZZ: float
    phase_slopes: tuple[float, float]
    margins: dict = field(default_factory=dict, compare=False)

    @property
    def phase(self) -> PhaseClass | None:
        """Common phase class, or None when the species disagree."""
        a, b = self.phase_class
        return a if a == b else None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["phase_class"] = [c.value for c in self.phase_class]
        d["trapping"] = self.trapping.value
        d["phase_slopes"] = list(self.phase_slopes)
        return d


class Ambiguous(RuntimeError):
    """Statistics sit on both sides of a threshold; `label` is the best guess."""

    def __init__(self, reason: str, label: RegimeLabel):
        super().__init__(f"{reason}; margins {label.margins}")
        self.reason, self.label = reason, label


def _wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def _phase_stats(t, phi):
    slope, icpt = np.polyfit(t, phi, 1)
    resid = phi - (slope * t + icpt)
    ss = float(np.sum((phi - phi.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 0.0
    circ = math.atan2(float(np.mean(np.sin(phi))), float(np.mean(np.cos(phi))))
    return float(slope), r2, circ


def _phase_class(slope, r2, circ, cfg: ClassifierConfig):
    if abs(slope) > cfg.slope_threshold and r2 > cfg.r2_min:
        return PhaseClass.RUNNING, True
    if abs(circ) < cfg.phi_tol and abs(slope) <= cfg.slope_threshold:
        return PhaseClass.ZERO, True
    if abs(_wrap(circ - math.pi)) < cfg.phi_tol:
        return PhaseClass.PI, True
    return (PhaseClass.ZERO if abs(circ) < math.pi / 2 else PhaseClass.PI), False


def _trivial_unstable(p: ModelParams, phase: PhaseClass | None) -> bool:
    modes = {PhaseClass.ZERO: [Mode.ZERO], PhaseClass.PI: [Mode.PI]}.get(phase, [Mode.ZERO, Mode.PI])
    return any(not normal_mode_frequencies(p, m).stable for m in modes)


def classify(traj: Trajectory, cfg: ClassifierConfig = ClassifierConfig()) -> RegimeLabel:
    """Label a trajectory from time averages taken after the transient.

    Swapping labels additionally require the trivial fixed point of the
    observed phase mode to be linearly unstable: below that threshold the
    correlated motion is ordinary (linear) Josephson oscillation.
    """
    t = traj.times
    if t[-1] - t[0] < cfg.min_duration:
        raise ValueError(f"trajectory spans {t[-1] - t[0]:.3g} < min_duration {cfg.min_duration}")
    keep = t >= t[0] + cfg.transient * (t[-1] - t[0])
    t = t[keep]
    Za, Zb = traj.Z_a[keep], traj.Z_b[keep]

    ma, mb = float(Za.mean()), float(Zb.mean())
    corr = float(np.mean(Za * Zb))
    trap_a = cfg.trap_fraction * float(np.max(np.abs(Za)))
    trap_b = cfg.trap_fraction * float(np.max(np.abs(Zb)))
    corr_thr = cfg.corr_fraction * math.sqrt(float(np.mean(Za * Za))) * math.sqrt(float(np.mean(Zb * Zb)))

    classes, slopes, clear = [], [], True
    for phi in (traj.phi_a[keep], traj.phi_b[keep]):
        slope, r2, circ = _phase_stats(t, phi)
        c, ok = _phase_class(slope, r2, circ, cfg)
        classes.append(c)
        slopes.append(slope)
        clear &= ok

    margins = {
        "mean_over_trap_a": abs(ma) / trap_a if trap_a > 0 else 0.0,
        "mean_over_trap_b": abs(mb) / trap_b if trap_b > 0 else 0.0,
        "corr_over_threshold": corr / corr_thr if corr_thr > 0 else 0.0,
    }
    trapped_a, trapped_b = abs(ma) > trap_a, abs(mb) > trap_b
    phase = classes[0] if classes[0] == classes[1] else None
    if trapped_a and trapped_b:
        trapping = Trapping.MQST_SEPARATED if ma * mb < 0 else Trapping.MQST_COEXISTING
    elif not trapped_a and not trapped_b and abs(corr) > corr_thr and _trivial_unstable(traj.params, phase):
        trapping = Trapping.SWAPPING_AVOIDING if corr < 0 else Trapping.SWAPPING_CHASING
    elif trapped_a or trapped_b:
        trapping = Trapping.MQST_SEPARATED if ma * mb < 0 else Trapping.MQST_COEXISTING
        label = RegimeLabel(tuple(classes), trapping, ma, mb, corr, tuple(slopes), margins)
        raise Ambiguous("only one species exceeds the trapping threshold", label)
    else:
        trapping = Trapping.OSCILLATORY

    label = RegimeLabel(tuple(classes), trapping, ma, mb, corr, tuple(slopes), margins)
    if not clear:
        raise Ambiguous("relative phase is neither locked nor running", label)
    return label


def classify_lenient(traj: Trajectory, cfg: ClassifierConfig = ClassifierConfig()) -> tuple[RegimeLabel, bool]:
    """(label, ambiguous) without raising on straddled thresholds."""
    try:
        return classify(traj, cfg), False
    except Ambiguous as e:
        return e.label, True


def same_well_family(ratio: float = 0.9, phase: float = 0.0) -> Callable[[float], State]:
    """z -> (z, ratio*z, phase, phase): both species start in the same well.

    ratio = 1 lies on the invariant manifold Z_a = Z_b of symmetric
    parameters, from which the species can never separate, so the default
    breaks that degeneracy slightly.
    """
    return lambda z: State(z, ratio * z, phase, phase)


def opposite_well_family(ratio: float = -0.9, phase: float = math.pi) -> Callable[[float], State]:
    """z -> (z, ratio*z, phase, phase) with ratio < 0: species start in separate wells."""
    return lambda z: State(z, ratio * z, phase, phase)


class Control(str, enum.Enum):
    LAMBDA = "Lambda"
    INITIAL_IMBALANCE = "InitialImbalance"


@dataclass
class Transition:
    value: float
    bracket: tuple[float, float]
    below: RegimeLabel
    above: RegimeLabel
    grid: list[float]
    labels: list[str]


def with_lambda(p: ModelParams, Lambda: float, ratio: float | None = None) -> ModelParams:
    """Template with Lambda_a = Lambda_b = Lambda and Lambda_ab = ratio * Lambda.

    `ratio` defaults to the template's Lambda_ab / Lambda_a.
    """
    if ratio is None:
        ratio = p.Lambda_ab / p.Lambda_a if p.Lambda_a else 2.13
    return replace(p, Lambda_a=Lambda, Lambda_b=Lambda, Lambda_ab=ratio * Lambda)


def swap_transition_scan(p_template: ModelParams, ic_family: Callable[[float], State],
                         control: Control, lo: float, hi: float, *, n_grid: int = 11,
                         z0: float = 0.1, ratio: float | None = None, refine_tol: float = 1e-4,
                         icfg: IntegratorConfig = IntegratorConfig(t_end=100.0),
                         ccfg: ClassifierConfig = ClassifierConfig()) -> Transition:
    """Locate a boundary between MQST_* and Swapping_* labels along one control parameter.

    For control=LAMBDA the initial state is ic_family(z0) and Lambda_ab follows
    `ratio`; for control=INITIAL_IMBALANCE the parameters are the template
    and the initial state is ic_family(value).
    """
    control = Control(control)
    if not hi > lo or n_grid < 2:
        raise NoTransition(f"degenerate scan range [{lo}, {hi}]")

    def label_at(v):
        if control is Control.LAMBDA:
            p, s0 = with_lambda(p_template, v, ratio), ic_family(z0)
        else:
            p, s0 = p_template, ic_family(v)
        return classify_lenient(integrate(p, s0, icfg), ccfg)[0]

    grid = list(np.linspace(lo, hi, n_grid))
    labels = [label_at(v) for v in grid]
    fams = [lab.trapping.family for lab in labels]
    for i in range(n_grid - 1):
        if {fams[i], fams[i + 1]} == {"MQST", "Swapping"}:
            break
    else:
        raise NoTransition(f"no MQST/Swapping boundary in [{lo}, {hi}]: {[l.trapping.value for l in labels]}")

    a, b = grid[i], grid[i + 1]
    la, lb = labels[i], labels[i + 1]
    while b - a > refine_tol:
        m = 0.5 * (a + b)
        lm = label_at(m)
        if lm.trapping.family == la.trapping.family:
            a, la = m, lm
        elif lm.trapping.family == lb.trapping.family:
            b, lb = m, lm
        else:
            break
    return Transition(0.5 * (a + b), (a, b), la, lb, [float(g) for g in grid],
                      [l.trapping.value for l in labels])
