"""Two-mode coupling constants from gridded symmetric/antisymmetric spatial modes.

All integrals use the composite trapezoid rule on the supplied grid; a
Richardson estimate (full grid against every other node) is reported per
integral. hbar = 1 throughout.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, fields, replace

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .model import ModelParams

log = logging.getLogger(__name__)


class GridError(ValueError):
    pass


class NormalizationError(ValueError):
    def __init__(self, name: str, norm: float):
        super().__init__(f"{name} has norm {norm!r}, expected 1")
        self.name, self.norm = name, norm


class DegenerateModes(ValueError):
    pass


MODE_COLUMNS = ("chi_a_plus", "chi_a_minus", "chi_b_plus", "chi_b_minus")
NORM_TOL = 1e-6
ORTHO_TOL = 1e-3  # loose: a jump that falls on a node costs O(dx) in the overlap


@dataclass(frozen=True, eq=False)
class SpatialModes:
    x: np.ndarray
    chi_a_plus: np.ndarray
    chi_a_minus: np.ndarray
    chi_b_plus: np.ndarray
    chi_b_minus: np.ndarray
    gbar_a: float = 1.0
    gbar_b: float = 1.0
    gbar_ab: float = 1.0
    deltaE_a: float = 1.0
    deltaE_b: float = 1.0
    f_a: float = 0.5
    f_b: float = 0.5

    def __post_init__(self):
        for name in ("x",) + MODE_COLUMNS:
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def __eq__(self, other):
        if not isinstance(other, SpatialModes):
            return NotImplemented
        return all(np.array_equal(getattr(self, f.name), getattr(other, f.name)) for f in fields(self))

    def swapped(self) -> "SpatialModes":
        return replace(self, chi_a_plus=self.chi_b_plus, chi_a_minus=self.chi_b_minus,
                       chi_b_plus=self.chi_a_plus, chi_b_minus=self.chi_a_minus,
                       gbar_a=self.gbar_b, gbar_b=self.gbar_a, deltaE_a=self.deltaE_b,
                       deltaE_b=self.deltaE_a, f_a=self.f_b, f_b=self.f_a)

    def present_species(self) -> tuple[str, ...]:
        """Species with any nonzero amplitude; an all-zero species is treated as absent."""
        return tuple(l for l in ("a", "b")
                     if np.any(getattr(self, f"chi_{l}_plus")) or np.any(getattr(self, f"chi_{l}_minus")))

    def overlaps(self) -> dict[str, float]:
        return {l: quad(getattr(self, f"chi_{l}_plus") * getattr(self, f"chi_{l}_minus"), self.x)
                for l in ("a", "b")}

    def validate(self, species=None, orthogonality: bool = False) -> None:
        x = self.x
        if x.ndim != 1 or len(x) < 3:
            raise GridError("grid needs at least 3 points")
        if not np.all(np.diff(x) > 0):
            raise GridError("grid must be strictly increasing")
        for name in MODE_COLUMNS:
            if getattr(self, name).shape != x.shape:
                raise GridError(f"{name} has length {getattr(self, name).shape}, grid has {x.shape}")
        for l in self.present_species() if species is None else species:
            for sign in ("plus", "minus"):
                name = f"chi_{l}_{sign}"
                norm = float(trapezoid(getattr(self, name) ** 2, x))
                if abs(norm - 1.0) > NORM_TOL:
                    raise NormalizationError(name, norm)
            if orthogonality:
                ov = float(trapezoid(getattr(self, f"chi_{l}_plus") * getattr(self, f"chi_{l}_minus"), x))
                if abs(ov) > ORTHO_TOL:
                    raise NormalizationError(f"<chi_{l}_plus|chi_{l}_minus>", ov)


@dataclass(frozen=True)
class TwoModeParams:
    gamma_plus_a: float
    gamma_plus_b: float
    gamma_minus_a: float
    gamma_minus_b: float
    gammabar_a: float
    gammabar_b: float
    delta_gamma_a: float
    delta_gamma_b: float
    delta_gamma_ab: float
    delta_gammabar_ab: float
    Lambda_a: float
    Lambda_b: float
    Lambda_ab: float
    K_a: float
    K_b: float
    C_a: float
    C_b: float
    D_ab: float
    D_ba: float
    f_a: float
    f_b: float

    def to_model_params(self, **kw) -> ModelParams:
        """ModelParams using the bare tunneling K_l; the model dresses it per state.

        The model carries a single cross overlap D_ab. When D_ab and D_ba differ
        the flow is no longer Hamiltonian, so that case is logged.
        """
        if abs(self.D_ab - self.D_ba) > 1e-12 * max(1.0, abs(self.D_ab)):
            log.warning("D_ab = %r differs from D_ba = %r; the model uses D_ab", self.D_ab, self.D_ba)
        return ModelParams(f_a=self.f_a, f_b=self.f_b, K_a=self.K_a, K_b=self.K_b,
                           Lambda_a=self.Lambda_a, Lambda_b=self.Lambda_b, Lambda_ab=self.Lambda_ab,
                           C_a=self.C_a, C_b=self.C_b, D_ab=self.D_ab, **kw)

    def to_dict(self) -> dict:
        return asdict(self)


def quad(y, x) -> float:
    return float(trapezoid(y, x))


def richardson_error(y, x) -> float:
    """|T(h) - T(2h)| / 3 for the trapezoid rule; 0 when the grid is too short."""
    if len(x) < 5 or len(x) % 2 == 0:
        return 0.0
    return abs(quad(y, x) - quad(y[::2], x[::2])) / 3.0


def _integrands(m: SpatialModes) -> dict:
    ap, am, bp, bm = m.chi_a_plus, m.chi_a_minus, m.chi_b_plus, m.chi_b_minus
    return {
        "gamma_plus_a": (m.gbar_a, ap ** 4),
        "gamma_minus_a": (m.gbar_a, am ** 4),
        "gamma_plus_b": (m.gbar_b, bp ** 4),
        "gamma_minus_b": (m.gbar_b, bm ** 4),
        "gammabar_a": (m.gbar_a, ap ** 2 * am ** 2),
        "gammabar_b": (m.gbar_b, bp ** 2 * bm ** 2),
        "delta_gamma_ab": (m.gbar_ab, (am * bm) ** 2 - (ap * bp) ** 2),
        "delta_gammabar_ab": (m.gbar_ab, (am * bp) ** 2 - (ap * bm) ** 2),
        "Lambda_a": (m.gbar_a, 2 * (ap * am) ** 2 - 0.25 * (am ** 2 - ap ** 2) ** 2),
        "Lambda_b": (m.gbar_b, 2 * (bp * bm) ** 2 - 0.25 * (bm ** 2 - bp ** 2) ** 2),
        # grouped per species so that a<->b relabelling is bit-exact
        "Lambda_ab": (2 * m.gbar_ab, (ap * am) * (bp * bm)),
    }


def quadrature_errors(m: SpatialModes) -> dict:
    return {k: abs(g) * richardson_error(y, m.x) for k, (g, y) in _integrands(m).items()}


def compute_two_mode_params(m: SpatialModes, validate: bool = True) -> TwoModeParams:
    if validate:
        m.validate()
    v = {k: g * quad(y, m.x) for k, (g, y) in _integrands(m).items()}
    dg_a = v["gamma_minus_a"] - v["gamma_plus_a"]
    dg_b = v["gamma_minus_b"] - v["gamma_plus_b"]
    C_a = (v["gamma_plus_a"] + v["gamma_minus_a"] - 2 * v["gammabar_a"]) / 2
    C_b = (v["gamma_plus_b"] + v["gamma_minus_b"] - 2 * v["gammabar_b"]) / 2
    D_ab = (v["delta_gamma_ab"] - v["delta_gammabar_ab"]) / 2
    # the b<->a overlap flips the sign of delta_gammabar
    D_ba = (v["delta_gamma_ab"] + v["delta_gammabar_ab"]) / 2
    return TwoModeParams(
        gamma_plus_a=v["gamma_plus_a"], gamma_plus_b=v["gamma_plus_b"],
        gamma_minus_a=v["gamma_minus_a"], gamma_minus_b=v["gamma_minus_b"],
        gammabar_a=v["gammabar_a"], gammabar_b=v["gammabar_b"],
        delta_gamma_a=dg_a, delta_gamma_b=dg_b,
        delta_gamma_ab=v["delta_gamma_ab"], delta_gammabar_ab=v["delta_gammabar_ab"],
        Lambda_a=v["Lambda_a"], Lambda_b=v["Lambda_b"], Lambda_ab=v["Lambda_ab"],
        K_a=m.deltaE_a - m.f_a * dg_a - m.f_b * D_ab,
        K_b=m.deltaE_b - m.f_b * dg_b - m.f_a * D_ba,
        C_a=C_a, C_b=C_b, D_ab=D_ab, D_ba=D_ba, f_a=m.f_a, f_b=m.f_b,
    )


def localized_modes(m: SpatialModes) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per species (chi_1, chi_2) = (chi_+ +- chi_-)/sqrt(2), renormalised, chi_1 on the left."""
    x = m.x
    xm = float(np.median(x))
    out = {}
    for l in ("a", "b"):
        plus, minus = getattr(m, f"chi_{l}_plus"), getattr(m, f"chi_{l}_minus")
        pair = []
        for c in ((plus + minus) / math.sqrt(2), (plus - minus) / math.sqrt(2)):
            norm = quad(c * c, x)
            if abs(norm - 1.0) > 0.1:
                raise DegenerateModes(f"species {l}: localized mode has norm {norm:.4g} before rescaling")
            pair.append(c / math.sqrt(norm))
        left = [_mass_below(c, x, xm) for c in pair]
        if left[1] > left[0]:
            pair.reverse()
            left.reverse()
        if left[0] < 0.5:
            raise DegenerateModes(f"species {l}: left-well mass {left[0]:.4g} < 0.5")
        out[l] = (pair[0], pair[1])
    return out


def _mass_below(c, x, xm) -> float:
    cum = cumulative_trapezoid(c * c, x, initial=0.0)
    return float(np.interp(xm, x, cum))
