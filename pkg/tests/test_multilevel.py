import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import expm_oracle

from offres.errors import ClosedFormUnavailable, InfiniteTime, RatioMismatch
from offres.multilevel import (
    LambdaSystem,
    Segment,
    ThreeLevelSchedule,
    hub_hamiltonian,
    lambda_decomposition,
    lambda_n_period_amplitudes,
    lambda_period_unitary,
    lambda_propagator,
    n_level_superposition,
    photon_storage_evolution,
    scan_segment_durations,
    superposition_target,
    superposition_time,
    three_level_modulated_evolution,
)

# frozen from the scipy expm segment product for (1, 2, 50, 100)
FIG10C_ROTATION = 0.04451376251118281
FIG10C_PERIOD = 0.09396658129560381
FIG10C_TIME = 3.315881480553966

couplings = st.floats(0.1, 3)
detunings = st.floats(-120, 120)


def test_propagator_identity_at_zero():
    assert np.allclose(lambda_propagator(LambdaSystem(1, 2, 50), 0.0), np.eye(3), atol=1e-15)


@settings(max_examples=80, deadline=None)
@given(couplings, couplings, detunings, st.floats(0, 5))
def test_propagator_matches_expm(O1, O2, D, t):
    sys = LambdaSystem(O1, O2, D)
    assert np.abs(lambda_propagator(sys, t) - expm_oracle(sys.hamiltonian(), t)).max() < 1e-9


def test_propagator_time_array_shape():
    U = lambda_propagator(LambdaSystem(1, 2, 5), np.linspace(0, 1, 4))
    assert U.shape == (4, 3, 3)


def test_large_detuning_suppresses_upper_level():
    sys = LambdaSystem(1.0, 2.0, 200.0)
    t = np.linspace(0, 5, 501)
    p2 = np.abs(lambda_propagator(sys, t)[:, 2, 0]) ** 2
    bound = 4 * sys.coupling1**2 / sys.y**2
    assert p2.max() <= bound + 1e-12


def test_delta_path_warns_and_matches():
    sys = LambdaSystem(1.0, 2.0, 30.0, delta=3.0)
    with pytest.warns(ClosedFormUnavailable):
        U = lambda_propagator(sys, 0.8)
    assert np.abs(U - expm_oracle(sys.hamiltonian(), 0.8)).max() < 1e-10


@settings(max_examples=60, deadline=None)
@given(couplings, couplings, detunings, detunings)
def test_period_unitary_matches_segment_product(O1, O2, Da, Db):
    U, dec = lambda_period_unitary(O1, O2, Da, Db)
    ref = expm_oracle(LambdaSystem(O1, O2, Db).hamiltonian(), dec.t2) @ \
        expm_oracle(LambdaSystem(O1, O2, Da).hamiltonian(), dec.t1)
    assert np.abs(U - ref).max() < 1e-9
    assert abs(abs(dec.s1) - dec.y_a * dec.y_b) < 1e-9 * dec.y_a * dec.y_b


def test_equal_detunings_freeze():
    dec = lambda_decomposition(1, 2, 50, 50)
    assert dec.rotation == 0
    amp = lambda_n_period_amplitudes(dec, np.arange(5))
    assert np.allclose(np.abs(amp[:, 2]), 1)
    with pytest.raises(InfiniteTime):
        superposition_time(np.arctan(0.5), 1, 2, 50, 50)


@settings(max_examples=40, deadline=None)
@given(couplings, couplings, detunings, detunings, st.integers(0, 40))
def test_n_period_amplitudes_match_matrix_power(O1, O2, Da, Db, n):
    U, dec = lambda_period_unitary(O1, O2, Da, Db)
    ref = np.linalg.matrix_power(U, n)[:, 2]
    assert np.abs(lambda_n_period_amplitudes(dec, n) - ref).max() < 1e-8


def test_n_period_state_quadratures():
    dec = lambda_decomposition(1, 2, 50, 100)
    assert np.allclose(lambda_n_period_amplitudes(dec, 0), [0, 0, 1])
    n = np.arange(200)
    p = np.abs(lambda_n_period_amplitudes(dec, n)) ** 2
    assert np.abs(p[:, 2] - np.cos(n * dec.varphi) ** 2).max() < 1e-12
    assert np.abs(p[:, 0] / np.maximum(p[:, 1], 1e-300) - 0.25)[1:].max() < 1e-9


def test_fig10c_rotation_data():
    dec = lambda_decomposition(1, 2, 50, 100)
    assert abs(dec.rotation - FIG10C_ROTATION) < 1e-12
    assert abs(dec.period - FIG10C_PERIOD) < 1e-12
    assert abs(superposition_time(np.arctan(0.5), 1, 2, 50, 100) - FIG10C_TIME) < 1e-9


def test_fig10c_dip_reaches_zero():
    dec = lambda_decomposition(1, 2, 50, 100)
    n = np.arange(60)
    p2 = np.abs(lambda_n_period_amplitudes(dec, n)[:, 2]) ** 2
    assert p2.min() < 1e-3
    k = int(np.argmin(p2))
    assert abs(k * dec.period - FIG10C_TIME) < dec.period


def test_ratio_mismatch():
    with pytest.raises(RatioMismatch):
        superposition_time(np.arctan(0.4), 1, 2, 50, 100)


def test_superposition_target():
    assert np.allclose(superposition_target(1, 2), np.array([1, 2, 0]) / np.sqrt(5))


def test_n_level_two_matches_lambda():
    res = n_level_superposition([1.0, 2.0], 50, 100)
    assert abs(res.rotation - FIG10C_ROTATION) < 1e-10
    assert res.fidelity > 0.999


def test_n_level_equal_and_weighted():
    res3 = n_level_superposition([1.0, 1.0, 1.0], 40, 80)
    p = np.abs(res3.trajectory.states[res3.periods]) ** 2
    assert np.ptp(p[:3]) < 1e-10
    assert res3.fidelity > 0.99
    res4 = n_level_superposition([1.0, 2.0, 2.0, 1.0], 40, 80)
    p = np.abs(res4.trajectory.states[res4.periods]) ** 2
    assert abs(p[1] / p[0] - 4) < 1e-8 and abs(p[3] / p[0] - 1) < 1e-8
    assert res4.fidelity > 0.99


def test_hub_hamiltonian():
    H = hub_hamiltonian([1, 2], 5)
    assert np.allclose(H, LambdaSystem(1, 2, 5).hamiltonian())


def test_schedule_evolution_matches_oracle():
    sch = ThreeLevelSchedule(Segment(1, 2, 50), Segment(1, 2, 100))
    t1, t2 = sch.durations
    times = np.linspace(0, 5 * sch.period, 23)
    traj = three_level_modulated_evolution(sch, [0, 0, 1], times)
    Ua = expm_oracle(sch.first.system.hamiltonian(), t1)
    Ub = expm_oracle(sch.second.system.hamiltonian(), t2)
    for k, t in enumerate(times):
        n = int(np.floor(t / sch.period + 1e-12))
        tm = t - n * sch.period
        part = expm_oracle(sch.first.system.hamiltonian(), tm) if tm < t1 else \
            expm_oracle(sch.second.system.hamiltonian(), tm - t1) @ Ua
        ref = part @ np.linalg.matrix_power(Ub @ Ua, n) @ np.array([0, 0, 1])
        assert np.abs(traj.states[k] - ref).max() < 1e-9
    assert traj.metadata["path"] == "closed-form"


def test_bright_subspace_ratio_is_preserved():
    sch = ThreeLevelSchedule(Segment(1, 2, 50), Segment(1, 2, 100))
    times = np.arange(80) * sch.period
    s = three_level_modulated_evolution(sch, [0, 0, 1], times).states[1:]
    assert np.abs(s[:, 0] * 2 - s[:, 1] * 1).max() < 1e-8


def test_fig11a_transfer():
    sch = ThreeLevelSchedule(Segment(1, 1, 40, 10), Segment(1, 1, 20, 10))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ClosedFormUnavailable)
        traj = three_level_modulated_evolution(sch, [1, 0, 0], np.linspace(0, 150, 3001))
    assert traj.metadata["path"] == "oracle"
    assert traj["P2"].max() > 0.9


def test_fig11b_storage():
    sch = ThreeLevelSchedule(Segment(1, 1, 10, 0), Segment(1, 1, 10, 30), t1=2.56, t2=1.12)
    traj = photon_storage_evolution(sch, np.linspace(0, 200, 4001))
    assert traj.columns[1:] == ["P0_1", "P1_0", "P2_0"]
    assert traj["P2_0"].max() > 0.9


def test_fig12_transfer():
    sch = ThreeLevelSchedule(Segment(1, 1, 40), Segment(1, -1, 40))
    traj = three_level_modulated_evolution(sch, [0, 0, 1], np.linspace(0, 100, 2001))
    assert traj["P1"].max() > 0.9


def test_duration_scan_finds_the_chosen_pair():
    sch = ThreeLevelSchedule(Segment(1, 1, 10, 0), Segment(1, 1, 10, 30))
    best = scan_segment_durations(sch, [1, 0, 0], 2, [2.56, 1.0], [1.12, 0.5], n_max=200)
    assert best[0][1:3] == (2.56, 1.12)
    assert best[0][0] > 0.99
