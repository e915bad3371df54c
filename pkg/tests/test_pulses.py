from math import erf

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import ode_states

from offres.errors import IntegrationFailure, NoTransfer
from offres.pulses import (
    GaussianTrain,
    SmoothSquareWell,
    UniformNoise,
    gaussian_decomposition,
    gaussian_period_unitaries,
    inversion_pulse_count,
    predicted_transfer,
    pulses_for_inversion,
    rotation_parameters,
    simulate_smooth,
    smooth_field_value,
)


def fig3(gamma):
    return SmoothSquareWell(1.0, 3.0, 50.0, gamma)


def test_logistic_midpoint_is_exact():
    f = fig3(80.0)
    assert f.value(f.t1 / 2) == 2.0
    assert f.value(f.period - f.t1 / 2) == 2.0


def test_hard_wall_limit():
    f = fig3(1e6)
    assert abs(f.value(0.0) - 1.0) < 1e-6
    assert abs(f.value(f.period / 2) - 3.0) < 1e-6
    assert abs(f.value(3 * f.period + 0.01 * f.t1) - 1.0) < 1e-6


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 1e5), st.floats(0, 50))
def test_smooth_value_bounded_and_paths_agree(gamma, t):
    f = fig3(gamma)
    v = f.value(float(t))
    assert 1.0 - 1e-12 <= v <= 3.0 + 1e-12
    assert abs(v - float(f.value(np.array([t]))[0])) < 1e-12


def test_hard_value_is_two_level():
    f = fig3(50.0)
    t = np.linspace(0, 3 * f.period, 301)
    assert set(np.unique(f.hard_value(t))) <= {1.0, 3.0}


def test_noise_is_seeded_and_bounded():
    knots = np.linspace(0, 5, 101)
    a = UniformNoise(0.05, knots, 7)
    b = UniformNoise(0.05, knots, 7)
    c = UniformNoise(0.05, knots, 8)
    t = np.linspace(0, 5, 333)
    assert np.array_equal(a(t), b(t))
    assert not np.array_equal(a(t), c(t))
    assert np.abs(a(t)).max() <= 0.05


def test_noise_batch_matches_single_streams():
    knots = np.linspace(0, 1, 11)
    batch = UniformNoise(0.3, knots, [3, 4, 5])
    for k, s in enumerate([3, 4, 5]):
        assert np.array_equal(batch.values[:, k], UniformNoise(0.3, knots, s).values[:, 0])


@settings(max_examples=30, deadline=None)
@given(st.floats(1.0, 1e4), st.floats(0, 0.3), st.integers(0, 2**31 - 1))
def test_noisy_field_stays_in_band(gamma, amp, seed):
    f = fig3(gamma)
    t = np.linspace(0, 2 * f.period, 97)
    noise = UniformNoise(amp, t, seed)
    v = np.array([smooth_field_value(f, x, noise) for x in t])
    assert v.min() >= 1.0 - amp - 1e-12 and v.max() <= 3.0 + amp + 1e-12


def test_smooth_run_matches_ode_oracle():
    f = fig3(100.0)
    times = np.linspace(0, 2 * f.period, 9)
    traj = simulate_smooth(f, [1, 0], times)
    ref = ode_states(f.hamiltonian(), [1, 0], times, f.breakpoints(times[-1], resolution=1.0))
    assert np.abs(traj.states - ref).max() < 1e-7


def test_steep_smooth_well_tracks_hard_limit():
    f = fig3(1e4)
    times = np.linspace(0, 0.5, 26)
    a = simulate_smooth(f, [1, 0], times)
    b = simulate_smooth(f, [1, 0], times, hard=True)
    assert np.abs(a["P1"] - b["P1"]).max() < 1e-3


# ---------------------------------------------------------------- Gaussian trains


def test_no_drive_gives_no_transfer():
    g = gaussian_decomposition(0.0, 1.0, 2.0)
    assert g.R == 0.0
    assert abs(g.P - np.cos(8.0)) < 1e-12
    with pytest.raises(NoTransfer):
        pulses_for_inversion(g)


def test_resonant_pulse_has_no_q():
    g = gaussian_decomposition(1.3, 0.8, 0.0)
    assert g.Q == 0.0
    # pulse area A xi sqrt(2 pi) (erf-truncated at +-4 xi)
    area = 1.3 * 0.8 * np.sqrt(2 * np.pi) * erf(4 / np.sqrt(2))
    assert abs(g.vartheta - area % (2 * np.pi)) < 1e-9 or abs(g.vartheta - (2 * np.pi - area % (2 * np.pi))) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 6), st.floats(0.1, 4), st.floats(-5, 5))
def test_rotation_parameters_on_unit_sphere(A, xi, D):
    g = gaussian_decomposition(A, xi, D)
    assert abs(g.P**2 + g.Q**2 + g.R**2 - 1) < 1e-9
    assert 0 <= g.vartheta <= np.pi
    assert abs(np.cos(g.vartheta) - g.P) < 1e-12


@pytest.mark.parametrize("A, xi", [(1.613, 0.624), (0.1, 0.2), (0.5, 0.3), (4.6, 1.95)])
def test_magnus_matches_ode_oracle(A, xi):
    g = gaussian_decomposition(A, xi, 2.0)
    ref = ode_states(g.hamiltonian(), [1, 0], np.array([0.0, g.period]), rtol=1e-13, atol=1e-14)[-1]
    assert np.abs(g.unitary[:, 0] - ref).max() < 1e-8


def test_rk4_method_agrees_with_magnus():
    um = gaussian_period_unitaries(1.613, 0.624, 2.0)
    ur = gaussian_period_unitaries(1.613, 0.624, 2.0, method="rk4")
    assert np.abs(um - ur).max() < 1e-6


def test_batched_unitaries_match_singles():
    A = np.array([0.5, 1.0, 2.0])
    xi = np.array([0.3, 1.0, 2.5])
    U = gaussian_period_unitaries(A, xi, 2.0)
    for k in range(3):
        assert np.abs(U[k] - gaussian_period_unitaries(A[k], xi[k], 2.0)).max() < 1e-8


def test_step_rule_violation():
    with pytest.raises(IntegrationFailure):
        gaussian_period_unitaries(3.0, 2.0, 2.0, max_step=50.0)


def _train(vartheta, Q=0.0):
    R = np.sqrt(max(0.0, 1 - np.cos(vartheta) ** 2 - Q**2))
    return GaussianTrain(1.0, 1.0, 0.0, float(np.cos(vartheta)), Q, R, 0.0, vartheta, np.eye(2))


def test_pulse_counts():
    assert pulses_for_inversion(_train(np.pi / 2)) == (1, 0.0)
    n, infid = pulses_for_inversion(_train(np.pi / 10))
    assert n == 5 and infid < 1e-15
    assert inversion_pulse_count(np.pi / 10, 1) == pytest.approx(25)


def test_n_pulse_unitary_and_simulation():
    g = gaussian_decomposition(1.613, 0.624, 2.0)
    assert np.abs(g.n_pulse_unitary(1) - g.unitary).max() < 1e-12
    assert np.abs(g.n_pulse_unitary(4) - np.linalg.matrix_power(g.unitary, 4)).max() < 1e-12
    n, infid = pulses_for_inversion(g)
    assert n == 12
    sim = g.simulate(n)["P1"][-1]
    assert abs(sim - (1 - infid)) < 1e-6
    assert abs(predicted_transfer(g.Q, g.R, g.vartheta, n) - (1 - infid)) < 1e-15


def test_rotation_parameters_vectorised():
    U = gaussian_period_unitaries(np.array([[0.5, 1.5]]), np.array([[1.0, 0.7]]), 2.0)
    P, Q, R, theta, vt = rotation_parameters(U)
    assert P.shape == (1, 2) and vt.shape == (1, 2)
