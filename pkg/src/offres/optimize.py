"""
Grid searches over drive parameters: minimal transfer time curves,
detuning/coupling selectivity maps and Gaussian-pulse (A, xi) searches.

Everything is a deterministic grid evaluation; reported optima are always
re-checked against an independent propagation before being returned.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import xz_exponential
from .errors import DegenerateParameters, InfiniteTime, NoCandidate
from .pulses import (
    gaussian_decomposition,
    gaussian_period_unitaries,
    inversion_pulse_count,
    predicted_transfer,
    rotation_parameters,
)
from .twolevel import (
    SquareWellDrive,
    inversion_time,
    minimal_time_first_order,
    one_period_unitary,
    stroboscopic_propagator,
)

OBJECTIVES = ("exact_time", "first_order_time", "final_population", "abs_Q_prime")


@dataclass(frozen=True)
class SweepSpec:
    """One swept drive parameter with the others held fixed.

    ``parameter`` names a :class:`SquareWellDrive` field (``coupling1``,
    ``coupling2``, ``detuning1``, ``detuning2``) or ``detuning`` /
    ``coupling`` for the tied parameter of intensity / frequency mode.
    """

    parameter: str
    lo: float
    hi: float
    points: int
    mode: str = "intensity"
    fixed: dict = field(default_factory=dict)
    spacing: str = "linear"
    objective: str = "exact_time"

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if not self.lo < self.hi:
            raise ValueError("lo must be < hi")
        if self.spacing not in ("linear", "log"):
            raise ValueError("spacing must be 'linear' or 'log'")
        if self.spacing == "log" and self.lo <= 0:
            raise ValueError("log spacing needs lo > 0")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")

    def values(self):
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)

    def drive(self, value):
        p = dict(self.fixed)
        p[self.parameter] = float(value)
        if self.mode == "intensity":
            return SquareWellDrive.intensity(p["coupling1"], p["coupling2"], p["detuning"], int(p.get("m", 0)))
        if self.mode == "frequency":
            return SquareWellDrive.frequency(p["coupling"], p["detuning1"], p["detuning2"], int(p.get("m", 0)))
        return SquareWellDrive(p["coupling1"], p["detuning1"], p["coupling2"], p["detuning2"], int(p.get("m", 0)))


@dataclass
class TimeCurve:
    values: np.ndarray
    exact: np.ndarray
    first_order: np.ndarray
    tan_phi: np.ndarray
    gap: np.ndarray
    verified_population: np.ndarray

    def relative_error(self):
        return np.abs(self.exact - self.first_order) / self.exact


def scan_minimal_time(spec):
    """Exact and first-order ``T_f`` along the sweep.

    Points where either formula diverges (``phi = 0`` or a vanishing
    first-order denominator) are NaN and flagged in ``gap``.  Each finite
    point is checked by propagating ``|0>`` to ``T_f`` with the explicit
    segment product; the resulting ``P1`` is ``verified_population``.
    """
    vals = spec.values()
    n = len(vals)
    exact, first, tanp, pop = (np.full(n, np.nan) for _ in range(4))
    gap = np.zeros(n, dtype=bool)
    for k, v in enumerate(vals):
        drive = spec.drive(v)
        pd = one_period_unitary(drive)
        tanp[k] = pd.tan_phi
        try:
            exact[k] = inversion_time(drive, pd=pd)
            pop[k] = abs(stroboscopic_propagator(drive, exact[k], pd)[1, 0]) ** 2
        except InfiniteTime:
            gap[k] = True
        try:
            first[k] = minimal_time_first_order(drive)
        except DegenerateParameters:
            gap[k] = True
    return TimeCurve(vals, exact, first, tanp, gap, pop)


# --------------------------------------------------------------------------
# selectivity


@dataclass
class SelectivityMap:
    detunings: np.ndarray
    deviations: np.ndarray
    design_periods: int
    at_design: np.ndarray
    peak: np.ndarray


def selectivity_map(drive, detunings, deviations, horizon=3):
    """Transferred population for spectator transitions.

    A spectator has detuning ``Delta_k`` and first-segment coupling
    ``(1 + delta) Omega_1`` but sees the design drive's segment durations.
    ``at_design`` is ``P1`` after the design number of periods
    ``round(pi/(2 phi))``; ``peak`` is the largest stroboscopic ``P1`` over
    ``horizon`` times that many periods.  Rows follow ``detunings``.
    """
    pd = one_period_unitary(drive)
    if pd.phi <= 0:
        raise InfiniteTime("design drive has phi = 0")
    n_design = max(1, int(np.rint((4 * drive.m + 1) * np.pi / (2 * pd.phi))))
    Dk = np.asarray(detunings, dtype=float)[:, None]
    dev = np.asarray(deviations, dtype=float)[None, :]
    U1 = xz_exponential((1 + dev) * drive.coupling1 * drive.t1, 0.5 * Dk * drive.t1)
    U2 = xz_exponential(drive.coupling2 * drive.t2 + 0 * dev, 0.5 * Dk * drive.t2)
    U = U2 @ U1
    psi = np.zeros(U.shape[:-1], dtype=complex)
    psi[..., 0] = 1.0
    peak = np.zeros(U.shape[:2])
    at_design = None
    for k in range(1, horizon * n_design + 1):
        psi = (U @ psi[..., None])[..., 0]
        p1 = np.abs(psi[..., 1]) ** 2
        peak = np.maximum(peak, p1)
        if k == n_design:
            at_design = p1
    return SelectivityMap(Dk[:, 0], dev[0], n_design, at_design, peak)


# --------------------------------------------------------------------------
# Gaussian trains


@dataclass
class GaussianCandidate:
    amplitude: float
    width: float
    pulses: int
    pulses_exact: float
    q_prime: float
    predicted: float
    simulated: float


def _grid_eval(A, xi, delta, m):
    U = gaussian_period_unitaries(A, xi, delta)
    _, Q, R, _, vt = rotation_parameters(U)
    with np.errstate(divide="ignore"):
        N_exact = inversion_pulse_count(vt, m)
    N = np.maximum(1, np.rint(np.nan_to_num(N_exact, posinf=0))).astype(int)
    return Q, N_exact, N, predicted_transfer(Q, R, vt, N)


def gaussian_search(delta, a_range, xi_range, m=0, q_threshold=1e-3, pulses=None, top_k=8, zoom_points=41,
                    verify_tol=1e-3):
    """Search ``(A, xi)`` for Gaussian trains that invert ``|0> -> |1>``.

    ``a_range`` and ``xi_range`` are ``(lo, hi, points)``.  The coarse grid
    is ranked by the predicted ``P1`` after the rounded pulse count
    (optionally restricted to ``pulses``); the ``top_k`` cells are refined by
    one zoom grid spanning their neighbours.  Refined optima with
    ``|Q'| < q_threshold`` are simulated pulse by pulse with RK4 and kept
    when the simulated and predicted ``P1`` agree within ``verify_tol``.
    Results are sorted by predicted infidelity.
    """
    a = np.linspace(*a_range[:2], int(a_range[2]))
    x = np.linspace(*xi_range[:2], int(xi_range[2]))
    if a[0] < 0 or x[0] <= 0:
        raise ValueError("amplitude must be >= 0 and width > 0")
    A, X = np.meshgrid(a, x, indexing="ij")
    Q, N_exact, N, P = _grid_eval(A, X, delta, m)
    score = np.where(N == pulses, P, -1.0) if pulses is not None else P
    order = np.argsort(-score, axis=None)[:top_k]
    da = a[1] - a[0] if len(a) > 1 else 0.0
    dx = x[1] - x[0] if len(x) > 1 else 0.0
    refined = []
    for flat in order:
        i, j = np.unravel_index(flat, A.shape)
        if score[i, j] < 0:
            continue
        za = np.linspace(max(a[i] - da, 0.0), a[i] + da, zoom_points)
        zx = np.linspace(max(x[j] - dx, 1e-9), x[j] + dx, zoom_points)
        ZA, ZX = np.meshgrid(za, zx, indexing="ij")
        zQ, zNe, zN, zP = _grid_eval(ZA, ZX, delta, m)
        ok = np.abs(zQ) < q_threshold
        if pulses is not None:
            ok &= zN == pulses
        if not ok.any():
            continue
        k = np.unravel_index(np.argmax(np.where(ok, zP, -1.0)), ZA.shape)
        refined.append((float(ZA[k]), float(ZX[k])))
    candidates = []
    for amp, width in dict.fromkeys(refined):
        g = gaussian_decomposition(amp, width, delta)
        n = max(1, int(np.rint(inversion_pulse_count(g.vartheta, m))))
        if pulses is not None and n != pulses:
            continue
        pred = float(predicted_transfer(g.Q, g.R, g.vartheta, n))
        sim = float(g.simulate(n)["P1"][-1])
        if abs(sim - pred) <= verify_tol:
            candidates.append(GaussianCandidate(amp, width, n, float(inversion_pulse_count(g.vartheta, m)),
                                                g.Q, pred, sim))
    if not candidates:
        raise NoCandidate(f"no (A, xi) cell reached |Q'| < {q_threshold:g} with a verified transfer")
    candidates.sort(key=lambda c: 1 - c.predicted)
    return candidates
