"""Two-mode equations of motion for a binary condensate mixture in a double well.

Units: hbar = 1, time measured in units of 1/K. The phase-space point is
(Z_a, Z_b, phi_a, phi_b) with Z_l the scaled population imbalance and phi_l
the (unwrapped) relative phase of species l.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, replace

import numpy as np


class DomainError(ValueError):
    """A state left the open interval |Z| < 1."""


class Tunneling(str, enum.Enum):
    CONSTANT = "constant"
    VARIABLE = "variable"


@dataclass(frozen=True)
class ModelParams:
    f_a: float = 0.5
    f_b: float = 0.5
    K_a: float = 1.0
    K_b: float = 1.0
    Lambda_a: float = 0.0
    Lambda_b: float = 0.0
    Lambda_ab: float = 0.0
    C_a: float = 0.0
    C_b: float = 0.0
    D_ab: float = 0.0
    tunneling: Tunneling = Tunneling.CONSTANT

    def __post_init__(self):
        object.__setattr__(self, "tunneling", Tunneling(self.tunneling))
        if not (self.f_a > 0 and self.f_b > 0):
            raise ValueError(f"population fractions must be positive, got {self.f_a}, {self.f_b}")
        if abs(self.f_a + self.f_b - 1.0) > 1e-12:
            raise ValueError(f"f_a + f_b must equal 1, got {self.f_a + self.f_b}")
        if not (self.K_a > 0 and self.K_b > 0):
            raise ValueError(f"tunneling amplitudes must be positive, got {self.K_a}, {self.K_b}")

    @classmethod
    def symmetric(cls, Lambda: float, ratio: float = 2.13, K: float = 1.0, **kw) -> "ModelParams":
        """Equal species with Lambda_ab = ratio * Lambda."""
        return cls(K_a=K, K_b=K, Lambda_a=Lambda, Lambda_b=Lambda, Lambda_ab=ratio * Lambda, **kw)

    @property
    def is_symmetric(self) -> bool:
        return (self.K_a == self.K_b and self.Lambda_a == self.Lambda_b
                and self.f_a == self.f_b and self.C_a == self.C_b)

    def swapped(self) -> "ModelParams":
        """Same physics with species labels a and b exchanged."""
        return replace(self, f_a=self.f_b, f_b=self.f_a, K_a=self.K_b, K_b=self.K_a,
                       Lambda_a=self.Lambda_b, Lambda_b=self.Lambda_a, C_a=self.C_b, C_b=self.C_a)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["tunneling"] = self.tunneling.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        return cls(**d)


@dataclass(frozen=True)
class State:
    Z_a: float
    Z_b: float
    phi_a: float
    phi_b: float

    def __post_init__(self):
        if not (abs(self.Z_a) < 1 and abs(self.Z_b) < 1):
            raise DomainError(f"|Z| must be < 1, got Z_a={self.Z_a}, Z_b={self.Z_b}")

    def as_array(self) -> np.ndarray:
        return np.array([self.Z_a, self.Z_b, self.phi_a, self.phi_b])

    @classmethod
    def from_array(cls, y) -> "State":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))

    def swapped(self) -> "State":
        return State(self.Z_b, self.Z_a, self.phi_b, self.phi_a)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SpinPair:
    a: tuple[float, float, float]
    b: tuple[float, float, float]


def _roots(Z_a, Z_b):
    if abs(Z_a) >= 1 or abs(Z_b) >= 1:
        raise DomainError(f"|Z| must be < 1, got Z_a={Z_a}, Z_b={Z_b}")
    return math.sqrt(1.0 - Z_a * Z_a), math.sqrt(1.0 - Z_b * Z_b)


def _dressed(p: ModelParams, Z_a, Z_b, phi_a, phi_b):
    if p.tunneling is Tunneling.CONSTANT:
        _roots(Z_a, Z_b)
        return p.K_a, p.K_b, p.Lambda_a, p.Lambda_b
    ra, rb = _roots(Z_a, Z_b)
    ca, cb = ra * math.cos(phi_a), rb * math.cos(phi_b)
    K_a = p.K_a - 2 * p.f_a * p.C_a * ca + p.f_b * p.D_ab * cb
    K_b = p.K_b - 2 * p.f_b * p.C_b * cb + p.f_a * p.D_ab * ca
    return K_a, K_b, p.Lambda_a + p.C_a, p.Lambda_b + p.C_b


def dressed_coefficients(p: ModelParams, s: State) -> tuple[float, float, float, float]:
    """(K̄_a, K̄_b, Λ̄_a, Λ̄_b) at state s; the bare values under constant tunneling."""
    return _dressed(p, s.Z_a, s.Z_b, s.phi_a, s.phi_b)


def rhs(p: ModelParams, y) -> np.ndarray:
    """Time derivative of the flat state vector [Z_a, Z_b, phi_a, phi_b]."""
    Z_a, Z_b, phi_a, phi_b = float(y[0]), float(y[1]), float(y[2]), float(y[3])
    K_a, K_b, L_a, L_b = _dressed(p, Z_a, Z_b, phi_a, phi_b)
    ra, rb = math.sqrt(1.0 - Z_a * Z_a), math.sqrt(1.0 - Z_b * Z_b)
    return np.array([
        -K_a * ra * math.sin(phi_a),
        -K_b * rb * math.sin(phi_b),
        L_a * p.f_a * Z_a + p.Lambda_ab * p.f_b * Z_b + K_a * Z_a / ra * math.cos(phi_a),
        L_b * p.f_b * Z_b + p.Lambda_ab * p.f_a * Z_a + K_b * Z_b / rb * math.cos(phi_b),
    ])


@dataclass(frozen=True)
class StateDerivative:
    dZ_a: float
    dZ_b: float
    dphi_a: float
    dphi_b: float

    def as_array(self) -> np.ndarray:
        return np.array([self.dZ_a, self.dZ_b, self.dphi_a, self.dphi_b])


def eval_rhs(p: ModelParams, s: State) -> StateDerivative:
    return StateDerivative(*map(float, rhs(p, (s.Z_a, s.Z_b, s.phi_a, s.phi_b))))


def _energy(p: ModelParams, Z_a, Z_b, phi_a, phi_b, w_a, w_b) -> float:
    ra, rb = _roots(Z_a, Z_b)
    xa, xb = ra * math.cos(phi_a), rb * math.cos(phi_b)
    if p.tunneling is Tunneling.CONSTANT:
        L_a, L_b, C_a, C_b, D = p.Lambda_a, p.Lambda_b, 0.0, 0.0, 0.0
    else:
        L_a, L_b, C_a, C_b, D = p.Lambda_a + p.C_a, p.Lambda_b + p.C_b, p.C_a, p.C_b, p.D_ab
    return (0.5 * w_a * w_a * L_a * Z_a * Z_a + 0.5 * w_b * w_b * L_b * Z_b * Z_b
            + w_a * w_b * p.Lambda_ab * Z_a * Z_b
            + w_a * w_a * C_a * xa * xa + w_b * w_b * C_b * xb * xb
            - w_a * p.K_a * xa - w_b * p.K_b * xb
            - w_a * w_b * D * xa * xb)


def hamiltonian(p: ModelParams, s: State, *, weighted: bool = True) -> float:
    """Energy of state s.

    With ``weighted=True`` (default) this is the invariant of the flow generated
    by :func:`rhs` for any population fractions and both tunneling variants:
    the canonical momenta are f_l Z_l, so every term carries its population
    weights. It is normalised so that for f_a = f_b = 1/2 it reads

        H = 1/4 [Λ̄_a Z_a² + Λ̄_b Z_b² + 2 Λ_ab Z_a Z_b] - Σ K̄_l sqrt(1-Z_l²) cos φ_l
            (constant tunneling).

    With ``weighted=False`` every population weight is replaced by one, giving
    the unit-weight form ½[Λ̄_a Z_a² + Λ̄_b Z_b² + 2Λ_ab Z_a Z_b] - Σ K_l ... which
    coincides with the spin energy but is *not* conserved.
    """
    if weighted:
        return 2.0 * _energy(p, s.Z_a, s.Z_b, s.phi_a, s.phi_b, p.f_a, p.f_b)
    return _energy(p, s.Z_a, s.Z_b, s.phi_a, s.phi_b, 1.0, 1.0)


def energy_array(p: ModelParams, y: np.ndarray) -> np.ndarray:
    """Weighted Hamiltonian along an (n, 4) array of states."""
    return np.array([2.0 * _energy(p, *row, p.f_a, p.f_b) for row in np.asarray(y)])


def spin_map(s) -> SpinPair:
    """Classical unit spins (S_x, S_y, S_z) for both species. Accepts |Z| = 1."""
    out = []
    for Z, phi in ((s.Z_a, s.phi_a), (s.Z_b, s.phi_b)):
        if abs(Z) > 1:
            raise DomainError(f"|Z| must be <= 1, got {Z}")
        r = math.sqrt(1.0 - Z * Z)
        out.append((r * math.cos(phi), r * math.sin(phi), float(Z)))
    return SpinPair(*out)


def spin_hamiltonian(p: ModelParams, sp: SpinPair) -> float:
    """Spin energy written in bare variables (C_l and D_ab always included)."""
    e = 0.0
    for (sx, _, sz), L, C, K in ((sp.a, p.Lambda_a, p.C_a, p.K_a), (sp.b, p.Lambda_b, p.C_b, p.K_b)):
        e += 0.5 * (L + C) * sz * sz + C * sx * sx - K * sx
    return e + p.Lambda_ab * sp.a[2] * sp.b[2] - p.D_ab * sp.a[0] * sp.b[0]


def jacobian(p: ModelParams, y) -> np.ndarray:
    """4x4 Jacobian of :func:`rhs`; closed form for constant tunneling, central differences otherwise."""
    y = np.asarray(y, dtype=float)
    if p.tunneling is Tunneling.VARIABLE:
        J = np.empty((4, 4))
        for j in range(4):
            h = 1e-6 * max(1.0, abs(y[j]))
            if j < 2:
                h = min(h, 0.5 * (1.0 - abs(y[j])))
            e = np.zeros(4)
            e[j] = h
            J[:, j] = (rhs(p, y + e) - rhs(p, y - e)) / (2 * h)
        return J
    Z_a, Z_b, phi_a, phi_b = y
    ra, rb = _roots(Z_a, Z_b)
    J = np.zeros((4, 4))
    J[0, 0] = p.K_a * Z_a / ra * math.sin(phi_a)
    J[0, 2] = -p.K_a * ra * math.cos(phi_a)
    J[1, 1] = p.K_b * Z_b / rb * math.sin(phi_b)
    J[1, 3] = -p.K_b * rb * math.cos(phi_b)
    J[2, 0] = p.Lambda_a * p.f_a + p.K_a * math.cos(phi_a) / ra ** 3
    J[2, 1] = p.Lambda_ab * p.f_b
    J[2, 2] = -p.K_a * Z_a / ra * math.sin(phi_a)
    J[3, 0] = p.Lambda_ab * p.f_a
    J[3, 1] = p.Lambda_b * p.f_b + p.K_b * math.cos(phi_b) / rb ** 3
    J[3, 3] = -p.K_b * Z_b / rb * math.sin(phi_b)
    return J
