import numpy as np
import pytest

from offres.errors import NoCandidate
from offres.optimize import SweepSpec, gaussian_search, scan_minimal_time, selectivity_map
from offres.pulses import gaussian_decomposition
from offres.twolevel import SquareWellDrive, inversion_time


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("coupling1", 1, 0, 5)
    with pytest.raises(ValueError):
        SweepSpec("coupling1", 0, 1, 1)
    with pytest.raises(ValueError):
        SweepSpec("coupling1", 0, 1, 5, spacing="log")
    with pytest.raises(ValueError):
        SweepSpec("coupling1", 0, 1, 5, objective="speed")
    assert np.allclose(SweepSpec("d", 1, 100, 3, spacing="log").values(), [1, 10, 100])


def test_intensity_scan_gap_at_equal_couplings():
    spec = SweepSpec("coupling1", 0.5, 1.5, 5, fixed={"coupling2": 1.0, "detuning": 30.0})
    curve = scan_minimal_time(spec)
    assert curve.gap[2] and np.isnan(curve.exact[2])
    assert not curve.gap[[0, 1, 3, 4]].any()
    # the transfer time grows as the two couplings approach each other
    assert curve.exact[1] > curve.exact[0] and curve.exact[3] > curve.exact[4]
    assert np.nanmin(curve.verified_population) > 0.99


def test_scan_points_match_direct_calls():
    spec = SweepSpec("detuning1", 40, 300, 4, mode="frequency", fixed={"coupling": 1.0, "detuning2": 30.0})
    curve = scan_minimal_time(spec)
    for v, t in zip(curve.values, curve.exact):
        assert t == inversion_time(SquareWellDrive.frequency(1.0, v, 30.0))


def test_frequency_curve_flattens():
    spec = SweepSpec("detuning1", 100, 3000, 30, mode="frequency", fixed={"coupling": 1.0, "detuning2": 30.0})
    curve = scan_minimal_time(spec)
    tail = curve.exact[-10:]
    assert np.ptp(tail) / tail.mean() < 0.02
    assert np.all(curve.relative_error()[curve.tan_phi < 0.1] < 0.05)


def fig2c():
    return SquareWellDrive.intensity(3.0, 1.0, 100.0)


def test_selectivity_on_target_and_off_target():
    drive = fig2c()
    sm = selectivity_map(drive, [100.0, 105.0], [0.0], horizon=1)
    assert sm.at_design[0, 0] > 0.99
    assert sm.peak[1, 0] < 0.1


def test_selectivity_tolerates_small_coupling_errors():
    sm = selectivity_map(fig2c(), [100.0], [-0.01, 0.01])
    assert sm.at_design.min() > 0.9


def test_selectivity_shapes():
    sm = selectivity_map(fig2c(), np.linspace(80, 120, 5), np.linspace(-0.2, 0.2, 3))
    assert sm.at_design.shape == (5, 3) and sm.peak.shape == (5, 3)
    assert np.all(sm.peak >= sm.at_design)


def test_gaussian_search_finds_verified_candidate():
    cands = gaussian_search(2.0, (0.1, 6, 30), (0.1, 4, 30))
    best = cands[0]
    assert best.simulated > 0.99
    assert abs(best.pulses_exact - best.pulses) < 0.5
    assert abs(best.simulated - best.predicted) < 1e-3
    g = gaussian_decomposition(best.amplitude, best.width, 2.0)
    assert abs(g.Q) < 1e-3


def test_gaussian_search_pulse_constraint():
    cands = gaussian_search(2.0, (0.2, 3, 40), (0.2, 3, 40), pulses=5)
    assert all(c.pulses == 5 for c in cands)
    assert cands[0].simulated > 0.99


def test_gaussian_search_no_candidate():
    with pytest.raises(NoCandidate):
        gaussian_search(2.0, (0.0, 0.01, 3), (0.1, 0.2, 3), pulses=1)
    with pytest.raises(ValueError):
        gaussian_search(2.0, (-1, 1, 3), (0.1, 0.2, 3))
