import math

import numpy as np
import pytest

from bjjmix import IntegratorConfig, ModelParams, PoleApproach, State, Trajectory, integrate, reference_integrate

CFG = IntegratorConfig(t_end=100.0)


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=1e-3)
    with pytest.raises(ValueError):
        IntegratorConfig(t_end=0.0)


def test_fixed_point_stays_put():
    tr = integrate(ModelParams.symmetric(0.6), State(0, 0, 0, 0), CFG)
    assert np.max(np.abs(tr.states[:, :2])) < 1e-12
    ref = reference_integrate(ModelParams.symmetric(0.6), State(0, 0, 0, 0), 1e-4, 10.0, 1.0)
    assert np.max(np.abs(ref.states)) == 0.0


def test_sampling_grid():
    tr = integrate(ModelParams.symmetric(0.6), State(0.1, 0.05, 0, 0), IntegratorConfig(t_end=10.0))
    assert len(tr) == 201
    assert tr.times[-1] == 10.0
    assert np.allclose(np.diff(tr.times), 0.05)


def test_small_josephson_oscillation():
    tr = integrate(ModelParams.symmetric(0.6), State(0.1, 0.1, 0, 0), CFG)
    for Z in (tr.Z_a, tr.Z_b):
        assert 0.09 <= np.max(np.abs(Z)) <= 0.12
        assert abs(np.mean(Z)) < 0.01
        assert np.min(Z) < 0 < np.max(Z)


def test_pi_mode_self_trapping():
    tr = integrate(ModelParams.symmetric(0.8), State(0.1, 0.1, math.pi, math.pi), CFG)
    for Z in (tr.Z_a, tr.Z_b):
        assert np.min(Z[1:]) > 0


@pytest.mark.parametrize("s0", [State(0.1, 0.1, 0, 0), State(0.1, 0.1, math.pi, math.pi), State(0.2, 0.1, 0, 0)])
def test_reference_agreement(s0):
    p = ModelParams.symmetric(0.6 if s0.phi_a == 0 else 0.8)
    a = integrate(p, s0, IntegratorConfig(t_end=20.0, sample_interval=0.5))
    b = reference_integrate(p, s0, 1e-4, 20.0, 0.5)
    assert np.max(np.abs(a.states - b.states)) < 1e-6


def test_reference_step_halving():
    p, s0 = ModelParams.symmetric(0.6), State(0.1, 0.1, 0, 0)
    a = reference_integrate(p, s0, 1e-4, 10.0)
    b = reference_integrate(p, s0, 5e-5, 10.0)
    assert np.max(np.abs(a.states[-1] - b.states[-1])) < 1e-8


def test_reference_rejects_coarse_step():
    with pytest.raises(ValueError):
        reference_integrate(ModelParams(), State(0, 0, 0, 0), 1e-3, 1.0)


def test_energy_drift_variable_tunneling():
    p = ModelParams(f_a=0.3, f_b=0.7, K_a=1.2, Lambda_a=1.0, Lambda_b=0.4, Lambda_ab=0.9,
                    C_a=0.05, C_b=0.03, D_ab=0.02, tunneling="variable")
    tr = integrate(p, State(0.3, -0.2, 0.4, 1.0), CFG)
    assert tr.energy_drift() < 1e-9


def test_pole_approach_raised():
    # a huge margin makes any excursion count as reaching the pole
    with pytest.raises(PoleApproach) as e:
        integrate(ModelParams.symmetric(0.6), State(0.5, 0.1, 0, 0), IntegratorConfig(t_end=10.0, pole_margin=0.6))
    assert e.value.species == "a"


def test_trajectory_invariants():
    with pytest.raises(ValueError):
        Trajectory([0.0, 0.0], np.zeros((2, 4)), np.zeros(2), ModelParams())
    with pytest.raises(ValueError):
        Trajectory([0.0, 1.0], np.zeros((3, 4)), np.zeros(2), ModelParams())


def test_swap_symmetry_of_trajectories():
    p = ModelParams(f_a=0.4, f_b=0.6, K_a=1.3, Lambda_a=0.7, Lambda_b=1.1, Lambda_ab=1.5)
    s0 = State(0.2, -0.1, 0.3, 0.0)
    a = integrate(p, s0, IntegratorConfig(t_end=20.0))
    b = integrate(p.swapped(), s0.swapped(), IntegratorConfig(t_end=20.0))
    assert np.max(np.abs(a.swapped().states - b.states)) < 1e-8
