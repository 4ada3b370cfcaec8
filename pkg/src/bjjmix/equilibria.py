"""Fixed points, linear stability, normal modes and the self-trapping criterion."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, Tunneling, jacobian, rhs

log = logging.getLogger(__name__)


class SymmetryViolation(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, seed, residual):
        super().__init__(f"Newton from seed {seed} stalled at residual {residual:.3g}")
        self.seed, self.residual = seed, residual


class NoTransition(RuntimeError):
    pass


class Mode(str, enum.Enum):
    ZERO = "zero"
    PI = "pi"

    @property
    def phase(self) -> float:
        return 0.0 if self is Mode.ZERO else math.pi

    @property
    def sign(self) -> int:
        """(-1)^p: +1 for the zero mode, -1 for the pi mode."""
        return 1 if self is Mode.ZERO else -1


TRIVIAL_SNAP = 1e-9


class Branch(str, enum.Enum):
    TRIVIAL = "trivial"
    PLUS_MINUS = "plus_minus"
    MINUS_PLUS = "minus_plus"
    PLUS_PLUS = "plus_plus"
    MINUS_MINUS = "minus_minus"

    @classmethod
    def of(cls, Z_a: float, Z_b: float, tol: float = 1e-12) -> "Branch":
        if abs(Z_a) <= tol and abs(Z_b) <= tol:
            return cls.TRIVIAL
        sa = "plus" if Z_a >= 0 else "minus"
        sb = "plus" if Z_b >= 0 else "minus"
        return cls(f"{sa}_{sb}")


@dataclass(frozen=True)
class FixedPoint:
    mode: Mode
    Z_a: float
    Z_b: float
    branch: Branch
    stable: bool
    frequencies: tuple[float, float] | None  # None marks an unstable point
    eigenvalues: tuple[complex, ...]
    residual: float
    asymmetric: bool = False  # Z_a != +-Z_b
    source: str = "analytic"

    @property
    def state(self) -> np.ndarray:
        return np.array([self.Z_a, self.Z_b, self.mode.phase, self.mode.phase])

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "Z_a": self.Z_a,
            "Z_b": self.Z_b,
            "phi": self.mode.phase,
            "branch": self.branch.value,
            "asymmetric": self.asymmetric,
            "stable": self.stable,
            # stability of nontrivial points comes from the Jacobian spectrum only
            "stability_source": "jacobian",
            "frequencies": list(self.frequencies) if self.frequencies is not None else "unstable",
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "residual": self.residual,
            "source": self.source,
        }


@dataclass(frozen=True)
class StabilityReport:
    mode: Mode
    omega_sq_plus: float
    omega_sq_minus: float
    mqst: bool
    lambda_star_a: float
    lambda_star_b: float

    @property
    def stable(self) -> bool:
        return self.omega_sq_plus > 0 and self.omega_sq_minus > 0

    @property
    def omega_plus(self) -> float | None:
        return math.sqrt(self.omega_sq_plus) if self.omega_sq_plus >= 0 else None

    @property
    def omega_minus(self) -> float | None:
        return math.sqrt(self.omega_sq_minus) if self.omega_sq_minus >= 0 else None


def linear_stability(p: ModelParams, y, tol: float = 1e-8):
    """(stable, frequencies, eigenvalues) from the spectrum of the 4x4 Jacobian at y.

    A fixed point of this Hamiltonian flow is a stable centre when every
    eigenvalue is purely imaginary.
    """
    ev = np.linalg.eigvals(jacobian(p, y))
    ev = ev[np.lexsort((ev.real, -np.abs(ev.imag)))]
    scale = max(1.0, float(np.max(np.abs(ev))))
    stable = bool(np.max(np.abs(ev.real)) <= tol * scale)
    freqs = None
    if stable:
        im = np.sort(np.abs(ev.imag))[::-1]
        freqs = (float(im[0]), float(im[2]))
    return stable, freqs, tuple(complex(z) for z in ev)


def _residual(p: ModelParams, y) -> float:
    return float(np.max(np.abs(rhs(p, y))))


def _make_point(p, mode, Z_a, Z_b, source) -> FixedPoint:
    y = np.array([Z_a, Z_b, mode.phase, mode.phase])
    stable, freqs, ev = linear_stability(p, y)
    asym = not (abs(Z_a - Z_b) < 1e-9 or abs(Z_a + Z_b) < 1e-9)
    return FixedPoint(mode, float(Z_a), float(Z_b), Branch.of(Z_a, Z_b), stable, freqs, ev,
                      _residual(p, y), asym, source)


def _require_symmetric(p: ModelParams):
    if not (p.K_a == p.K_b and p.Lambda_a == p.Lambda_b and p.f_a == p.f_b == 0.5):
        raise SymmetryViolation("analytic fixed points need K_a = K_b, Lambda_a = Lambda_b, f = 1/2")
    if p.tunneling is Tunneling.VARIABLE and (p.C_a or p.C_b or p.D_ab):
        raise SymmetryViolation("analytic fixed points assume constant tunneling")


def symmetric_fixed_points(p: ModelParams, mode: Mode) -> list[FixedPoint]:
    """Trivial point plus every closed-form nontrivial pair.

    On a family Z_b = sigma*Z_a the fixed-point condition reduces to
    sqrt(1 - Z^2) = -2 s K / (Lambda + sigma*Lambda_ab) with s = +1 (zero) or -1 (pi),
    so a real pair exists when -s (Lambda + sigma*Lambda_ab) > 2K. For repulsive
    couplings this is the Z_b = -Z_a family in the zero mode and Z_b = Z_a in
    the pi mode.
    """
    mode = Mode(mode)
    _require_symmetric(p)
    K, L, Lab = p.K_a, p.Lambda_a, p.Lambda_ab
    points = [_make_point(p, mode, 0.0, 0.0, "analytic")]
    for sigma in (-1, 1):
        g = -mode.sign * (L + sigma * Lab)
        if g > 2 * K:
            Z = math.sqrt((g - 2 * K) * (g + 2 * K)) / g
            for z in (Z, -Z):
                points.append(_make_point(p, mode, z, sigma * z, "analytic"))
    return points


def default_seeds(n: int = 9, lim: float = 0.95) -> list[tuple[float, float]]:
    g = np.linspace(-lim, lim, n)
    return [(float(a), float(b)) for a in g for b in g]


def newton_fixed_point(p: ModelParams, mode: Mode, seed, tol: float = 1e-12,
                       max_iter: int = 200) -> tuple[float, float]:
    """Damped Newton on (dphi_a/dt, dphi_b/dt) = 0 at phi_a = phi_b = phase of `mode`."""
    mode = Mode(mode)
    ph = mode.phase
    z = np.array(seed, dtype=float)

    def F(z):
        return rhs(p, (z[0], z[1], ph, ph))[2:]

    f = F(z)
    r = float(np.max(np.abs(f)))
    for _ in range(max_iter):
        if r < tol:
            return float(z[0]), float(z[1])
        J = jacobian(p, (z[0], z[1], ph, ph))[2:, :2]
        try:
            dz = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-10:
            zn = z + lam * dz
            if np.all(np.abs(zn) < 1.0):
                fn = F(zn)
                rn = float(np.max(np.abs(fn)))
                if rn < r:
                    break
            lam *= 0.5
        else:
            break
        z, f, r = zn, fn, rn
    if r < tol:
        return float(z[0]), float(z[1])
    raise NoConvergence(tuple(seed), r)


def numeric_fixed_points(p: ModelParams, mode: Mode, seeds=None, failures: list | None = None,
                         tol: float = 1e-12) -> list[FixedPoint]:
    """Distinct roots of the transcendental fixed-point system reached from `seeds`.

    Seeds that fail to converge are logged and, if given, appended to `failures`.
    """
    mode = Mode(mode)
    seeds = default_seeds() if seeds is None else seeds
    roots: list[tuple[float, float]] = []
    for seed in seeds:
        try:
            z = newton_fixed_point(p, mode, seed, tol=tol)
        except NoConvergence as e:
            log.debug("%s", e)
            if failures is not None:
                failures.append(e)
            continue
        if math.hypot(*z) < TRIVIAL_SNAP:
            z = (0.0, 0.0)  # the trivial point is exact; Newton only gets within tol of it
        if all(math.hypot(z[0] - q[0], z[1] - q[1]) > 1e-8 for q in roots):
            roots.append(z)
    roots.sort()
    return [_make_point(p, mode, a, b, "numeric") for a, b in roots]


def lambda_star(p: ModelParams, mode: Mode) -> tuple[float, float]:
    s = Mode(mode).sign
    return s * p.K_a + p.f_a * p.Lambda_a, s * p.K_b + p.f_b * p.Lambda_b


def omega_squared(K_a, K_b, f_a, f_b, L_a, L_b, L_ab, mode: Mode):
    """(omega_+^2, omega_-^2) about the trivial point; broadcasts over array arguments.

    Linearising about Z = 0, phi = phase gives d²Z/dt² = -s A Z with
    A = [[K_a Ls_a, K_a f_b L_ab], [K_b f_a L_ab, K_b Ls_b]] and s = (-1)^p,
    so omega² = s*tr(A)/2 +- sqrt(disc)/2.
    """
    s = Mode(mode).sign
    Ls_a = s * K_a + f_a * L_a
    Ls_b = s * K_b + f_b * L_b
    half_tr = 0.5 * s * (K_a * Ls_a + K_b * Ls_b)
    half_root = 0.5 * np.sqrt((K_a * Ls_a - K_b * Ls_b) ** 2 + 4 * K_a * K_b * f_a * f_b * L_ab ** 2)
    return half_tr + half_root, half_tr - half_root


def normal_mode_frequencies(p: ModelParams, mode: Mode) -> StabilityReport:
    """Small-oscillation frequencies about the trivial point (constant tunneling)."""
    mode = Mode(mode)
    wp, wm = omega_squared(p.K_a, p.K_b, p.f_a, p.f_b, p.Lambda_a, p.Lambda_b, p.Lambda_ab, mode)
    la, lb = lambda_star(p, mode)
    mqst = p.f_a * p.f_b * p.Lambda_ab ** 2 >= la * lb
    return StabilityReport(mode, float(wp), float(wm), bool(mqst), la, lb)


def critical_lambda(p_template: ModelParams, mode: Mode, ratio: float,
                    lambda_max: float = 100.0, n_scan: int = 20001, tol: float = 1e-12) -> float:
    """Smallest Lambda > 0 where omega_-^2 changes sign with Lambda_ab = ratio * Lambda."""
    mode = Mode(mode)
    p = p_template
    if not (p.K_a == p.K_b and p.f_a == p.f_b):
        raise SymmetryViolation("critical_lambda needs a symmetric template")

    def w(L):
        return omega_squared(p.K_a, p.K_b, p.f_a, p.f_b, L, L, ratio * L, mode)[1]

    grid = np.linspace(0.0, lambda_max, n_scan)[1:]
    vals = w(grid)
    pos = vals > 0
    if not pos[0]:
        raise NoTransition(f"{mode.value} mode is already unstable at Lambda = {grid[0]:.3g}")
    idx = np.flatnonzero(~pos)
    if idx.size == 0:
        raise NoTransition(f"no {mode.value}-mode transition for Lambda in (0, {lambda_max}]")
    lo, hi = float(grid[idx[0] - 1]), float(grid[idx[0]])
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if w(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def stability_region(lambda_a, lambda_b, R: float, mode: Mode, lambda_ab: float,
                     K_b: float = 1.0, f_a: float = 0.5) -> np.ndarray:
    """Boolean grid [i, j] -> trivial `mode` point stable at (lambda_a[i], lambda_b[j]), K_a = R*K_b."""
    La, Lb = np.meshgrid(np.asarray(lambda_a, float), np.asarray(lambda_b, float), indexing="ij")
    wp, wm = omega_squared(R * K_b, K_b, f_a, 1 - f_a, La, Lb, lambda_ab, mode)
    return (wp > 0) & (wm > 0)
