"""Trajectories of the two-mode flow.

`integrate` drives scipy's DOP853 stepper one accepted step at a time so that
near-pole states are caught on every step and samples come from the step's
dense output. `reference_integrate` is a compiled fixed-step classical RK4
with its own copy of the right-hand side; it exists to check the former.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.integrate import DOP853

from .model import ModelParams, State, Tunneling, energy_array, rhs


class PoleApproach(RuntimeError):
    def __init__(self, t: float, species: str, Z: float):
        super().__init__(f"|Z_{species}| = {abs(Z):.12g} reached the pole margin at t = {t:.6g}")
        self.t, self.species, self.Z = t, species, Z


class StepFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    t_end: float = 100.0
    sample_interval: float = 0.05
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.1
    pole_margin: float = 1e-9

    def __post_init__(self):
        for name in ("t_end", "sample_interval", "rel_tol", "abs_tol", "max_step", "pole_margin"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.rel_tol > 1e-6 or self.abs_tol > 1e-6:
            raise ValueError("rel_tol and abs_tol must be <= 1e-6")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n, 4): Z_a, Z_b, phi_a, phi_b
    energies: np.ndarray
    params: ModelParams
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=float).reshape(-1, 4)
        self.energies = np.asarray(self.energies, dtype=float)
        n = len(self.times)
        if self.states.shape[0] != n or self.energies.shape[0] != n:
            raise ValueError("times, states and energies must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")
        if np.any(np.abs(self.states[:, :2]) >= 1):
            raise ValueError("trajectory contains |Z| >= 1")

    Z_a = property(lambda self: self.states[:, 0])
    Z_b = property(lambda self: self.states[:, 1])
    phi_a = property(lambda self: self.states[:, 2])
    phi_b = property(lambda self: self.states[:, 3])

    def __len__(self):
        return len(self.times)

    def state(self, i: int) -> State:
        return State.from_array(self.states[i])

    def energy_drift(self) -> float:
        """max |H(t) - H(0)| / max(1, |H(0)|)."""
        e0 = self.energies[0]
        return float(np.max(np.abs(self.energies - e0)) / max(1.0, abs(e0)))

    def swapped(self) -> "Trajectory":
        return Trajectory(self.times.copy(), self.states[:, [1, 0, 3, 2]].copy(),
                          self.energies.copy(), self.params.swapped(), dict(self.meta))


def _sample_times(t_end: float, dt: float) -> np.ndarray:
    n = int(math.floor(t_end / dt + 1e-9))
    t = np.arange(n + 1) * dt
    if t_end - t[-1] > 1e-9 * dt:
        t = np.append(t, t_end)
    return t


def _check_pole(t, y, margin):
    for i, name in ((0, "a"), (1, "b")):
        if abs(y[i]) > 1.0 - margin:
            raise PoleApproach(float(t), name, float(y[i]))


def integrate(p: ModelParams, s0: State, cfg: IntegratorConfig = IntegratorConfig()) -> Trajectory:
    """Adaptive 8(5,3) Dormand-Prince integration sampled every cfg.sample_interval."""
    y0 = s0.as_array()
    _check_pole(0.0, y0, cfg.pole_margin)

    def f(t, y):
        if abs(y[0]) >= 1.0 or abs(y[1]) >= 1.0:
            # a trial stage overshot the pole; report it as a pole approach
            _check_pole(t, y, cfg.pole_margin)
        return rhs(p, y)

    ts = _sample_times(cfg.t_end, cfg.sample_interval)
    out = np.empty((len(ts), 4))
    out[0] = y0
    k = 1
    solver = DOP853(f, 0.0, y0, cfg.t_end, max_step=cfg.max_step,
                    rtol=cfg.rel_tol, atol=cfg.abs_tol)
    while k < len(ts):
        msg = solver.step()
        if solver.status == "failed":
            raise StepFailure(f"step size underflow at t = {solver.t:.6g}: {msg}")
        _check_pole(solver.t, solver.y, cfg.pole_margin)
        j = int(np.searchsorted(ts, solver.t, side="right"))
        if j > k:
            out[k:j] = solver.dense_output()(ts[k:j]).T
            if ts[j - 1] == solver.t:
                out[j - 1] = solver.y
            k = j
    return Trajectory(ts, out, energy_array(p, out), p,
                      {"method": "DOP853", "rel_tol": cfg.rel_tol, "abs_tol": cfg.abs_tol})


@numba.njit(cache=True)
def _rhs_nb(y, out, f_a, f_b, K_a, K_b, L_a, L_b, L_ab, C_a, C_b, D, variable):
    Z_a, Z_b, phi_a, phi_b = y[0], y[1], y[2], y[3]
    ra = math.sqrt(1.0 - Z_a * Z_a)
    rb = math.sqrt(1.0 - Z_b * Z_b)
    ka, kb, la, lb = K_a, K_b, L_a, L_b
    if variable:
        ca = ra * math.cos(phi_a)
        cb = rb * math.cos(phi_b)
        ka = K_a - 2.0 * f_a * C_a * ca + f_b * D * cb
        kb = K_b - 2.0 * f_b * C_b * cb + f_a * D * ca
        la = L_a + C_a
        lb = L_b + C_b
    out[0] = -ka * ra * math.sin(phi_a)
    out[1] = -kb * rb * math.sin(phi_b)
    out[2] = la * f_a * Z_a + L_ab * f_b * Z_b + ka * Z_a / ra * math.cos(phi_a)
    out[3] = lb * f_b * Z_b + L_ab * f_a * Z_a + kb * Z_b / rb * math.cos(phi_b)


@numba.njit(cache=True)
def _rk4_nb(y0, h, nsteps, every, margin, args):
    nsamp = nsteps // every + 1
    out = np.empty((nsamp, 4))
    y = y0.copy()
    k1 = np.empty(4)
    k2 = np.empty(4)
    k3 = np.empty(4)
    k4 = np.empty(4)
    tmp = np.empty(4)
    out[0] = y
    f_a, f_b, K_a, K_b, L_a, L_b, L_ab, C_a, C_b, D, variable = args
    for n in range(1, nsteps + 1):
        _rhs_nb(y, k1, f_a, f_b, K_a, K_b, L_a, L_b, L_ab, C_a, C_b, D, variable)
        for i in range(4):
            tmp[i] = y[i] + 0.5 * h * k1[i]
        _rhs_nb(tmp, k2, f_a, f_b, K_a, K_b, L_a, L_b, L_ab, C_a, C_b, D, variable)
        for i in range(4):
            tmp[i] = y[i] + 0.5 * h * k2[i]
        _rhs_nb(tmp, k3, f_a, f_b, K_a, K_b, L_a, L_b, L_ab, C_a, C_b, D, variable)
        for i in range(4):
            tmp[i] = y[i] + h * k3[i]
        _rhs_nb(tmp, k4, f_a, f_b, K_a, K_b, L_a, L_b, L_ab, C_a, C_b, D, variable)
        for i in range(4):
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if abs(y[0]) > 1.0 - margin or abs(y[1]) > 1.0 - margin:
            return out, n, y
        if n % every == 0:
            out[n // every] = y
    return out, -1, y


def reference_integrate(p: ModelParams, s0: State, step: float, t_end: float,
                        sample_interval: float | None = None,
                        pole_margin: float = 1e-9) -> Trajectory:
    """Fixed-step classical RK4. Samples every `sample_interval` (a multiple of `step`)."""
    if not 0 < step <= 1e-4:
        raise ValueError("reference step must be in (0, 1e-4]")
    nsteps = int(round(t_end / step))
    if abs(nsteps * step - t_end) > 1e-9 * t_end:
        raise ValueError("t_end must be an integer multiple of step")
    every = nsteps if sample_interval is None else int(round(sample_interval / step))
    if every < 1 or nsteps % every:
        raise ValueError("sample_interval must be a multiple of step dividing t_end")
    args = (p.f_a, p.f_b, p.K_a, p.K_b, p.Lambda_a, p.Lambda_b, p.Lambda_ab,
            p.C_a, p.C_b, p.D_ab, p.tunneling is Tunneling.VARIABLE)
    y0 = s0.as_array()
    _check_pole(0.0, y0, pole_margin)
    out, fail, y = _rk4_nb(y0, step, nsteps, every, pole_margin, args)
    if fail >= 0:
        _check_pole(fail * step, y, pole_margin)
    ts = np.arange(out.shape[0]) * (every * step)
    return Trajectory(ts, out, energy_array(p, out), p, {"method": "RK4", "step": step})
