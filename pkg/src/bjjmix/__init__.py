"""Two-species bosonic Josephson junction: two-mode dynamics, equilibria, regimes."""
from .model import DomainError, ModelParams, SpinPair, State, Tunneling, eval_rhs, hamiltonian, jacobian, spin_hamiltonian, spin_map
from .integrate import IntegratorConfig, PoleApproach, StepFailure, Trajectory, integrate, reference_integrate
from .equilibria import (FixedPoint, Mode, NoConvergence, NoTransition, StabilityReport, SymmetryViolation,
                         critical_lambda, linear_stability, normal_mode_frequencies, numeric_fixed_points,
                         omega_squared, stability_region, symmetric_fixed_points)
from .classify import (Ambiguous, ClassifierConfig, Control, PhaseClass, RegimeLabel, Trapping, classify,
                       classify_lenient, opposite_well_family, same_well_family, swap_transition_scan)
from .modeparams import SpatialModes, TwoModeParams, compute_two_mode_params, localized_modes
