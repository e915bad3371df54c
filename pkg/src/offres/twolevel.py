"""
Two-level system under periodic square-well driving.

A drive alternates between ``H1 = d1.sigma`` on ``[0, t1]`` and
``H2 = d2.sigma`` on ``(t1, T]`` with half-period pulse areas
``|d_j| t_j = pi/2 + 2 m pi``.  Over one period the product of the two
segment propagators is a pure rotation by ``phi`` about an equatorial axis,
so the stroboscopic dynamics is that of a resonant drive with the weak
effective coupling ``Lambda = (phi/T) exp(-i(theta + pi/2))``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import (
    SIGMA_X,
    SIGMA_Y,
    BlochHamiltonian,
    QuantumState,
    Trajectory,
    as_vector,
    integrate_schrodinger,
    su2_propagator,
)
from .errors import DegenerateParameters, InfiniteTime, UndefinedAzimuth


def interaction_hamiltonian(coupling, detuning):
    """Interaction-picture Hamiltonian ``Delta|1><1| + Omega(|0><1| + h.c.)``.

    As a Bloch vector this is ``d = (Omega, 0, Delta/2)``; the ``Delta/2``
    identity part is kept in ``offset`` and never enters the dynamics.
    """
    return BlochHamiltonian(float(coupling), 0.0, 0.5 * float(detuning), offset=0.5 * float(detuning))


@dataclass(frozen=True)
class SquareWellDrive:
    """Periodic two-segment drive.

    ``mode`` is ``"intensity"`` (equal detunings, couplings switched),
    ``"frequency"`` (equal couplings, detunings switched) or ``"general"``.
    Segment durations follow from ``|d_j| t_j = pi/2 + 2 m pi``.
    """

    coupling1: float
    detuning1: float
    coupling2: float
    detuning2: float
    m: int = 0
    mode: str = "general"

    def __post_init__(self):
        if self.mode == "intensity" and self.detuning1 != self.detuning2:
            raise ValueError("intensity modulation requires equal detunings")
        if self.mode == "frequency" and self.coupling1 != self.coupling2:
            raise ValueError("frequency modulation requires equal couplings")
        if self.mode not in ("intensity", "frequency", "general"):
            raise ValueError(f"unknown modulation mode {self.mode!r}")
        if int(self.m) != self.m or self.m < 0:
            raise ValueError("m must be a non-negative integer")
        if self.d1.norm == 0 or self.d2.norm == 0:
            raise ValueError("a segment with |d| = 0 has no finite half-period")

    @classmethod
    def intensity(cls, coupling1, coupling2, detuning, m=0):
        return cls(coupling1, detuning, coupling2, detuning, m, "intensity")

    @classmethod
    def frequency(cls, coupling, detuning1, detuning2, m=0):
        return cls(coupling, detuning1, coupling, detuning2, m, "frequency")

    @property
    def d1(self):
        return interaction_hamiltonian(self.coupling1, self.detuning1)

    @property
    def d2(self):
        return interaction_hamiltonian(self.coupling2, self.detuning2)

    @property
    def pulse_area(self):
        return np.pi / 2 + 2 * np.pi * self.m

    @property
    def t1(self):
        return self.pulse_area / self.d1.norm

    @property
    def t2(self):
        return self.pulse_area / self.d2.norm

    @property
    def period(self):
        return self.t1 + self.t2

    def segment_matrices(self):
        return self.d1.matrix(), self.d2.matrix()

    def hamiltonian(self, noise=None):
        """Callable ``H(t)`` for the hard square well.

        ``noise``, if given, is a callable ``eps(t)`` added to the coupling of
        whichever segment is active; it may return an array to drive a batch.
        """
        H1, H2 = self.segment_matrices()
        t1, T = self.t1, self.period
        if noise is None:
            def H(t):
                return H1 if (t % T) < t1 else H2
            return H

        def H_noisy(t):
            base = H1 if (t % T) < t1 else H2
            eps = np.asarray(noise(t), dtype=float)
            return base + eps[..., None, None] * SIGMA_X

        return H_noisy

    def coupling_at(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(np.mod(t, self.period) < self.t1, self.coupling1, self.coupling2)

    def breakpoints(self, t_max):
        n = int(np.ceil(t_max / self.period)) + 1
        k = np.arange(n)
        pts = np.concatenate([k * self.period, k * self.period + self.t1])
        return np.sort(pts[(pts > 0) & (pts < t_max)])

    def spectral_bound(self):
        return max(self.d1.norm, self.d2.norm)


@dataclass(frozen=True)
class PeriodDecomposition:
    """One-period unitary ``U(T,0) = exp(i alpha) [[cos phi, -sin phi e^{-i theta}], [sin phi e^{i theta}, cos phi]]``.

    ``phi`` lies in ``[0, pi/2]``; the global phase ``alpha`` is kept so that
    stroboscopic states reproduce the segment product exactly.
    """

    phi: float
    theta: float
    period: float
    global_phase: float
    unitary: np.ndarray
    azimuth_defined: bool = True

    @property
    def coupling(self):
        return effective_coupling(self)

    @property
    def tan_phi(self):
        return float(np.tan(self.phi))


def _rotation_data(U):
    alpha = 0.5 * np.angle(np.linalg.det(U))
    V = U * np.exp(-1j * alpha)
    if V[0, 0].real < 0:
        alpha += np.pi
        V = -V
    phi = float(np.arctan2(abs(V[1, 0]), V[0, 0].real))
    return phi, V, float(np.angle(np.exp(1j * alpha)))


def one_period_unitary(drive):
    """Decompose ``exp(-i H2 t2) exp(-i H1 t1)`` into rotation data.

    ``theta`` is read off the product itself, so ``tan(theta) = d1y/d1x``
    holds (for real couplings theta is 0 or pi depending on the rotation sense).
    """
    U = su2_propagator(drive.d2, drive.t2) @ su2_propagator(drive.d1, drive.t1)
    phi, V, alpha = _rotation_data(U)
    defined = drive.d1.transverse > 0 or drive.d2.transverse > 0
    if not defined:
        warnings.warn("both segments have dx = dy = 0; theta set to 0", UndefinedAzimuth, stacklevel=2)
        theta = 0.0
    elif abs(V[1, 0]) < 1e-300:
        theta = float(np.arctan2(drive.d1.dy, drive.d1.dx))
    else:
        theta = float(np.angle(V[1, 0]))
    return PeriodDecomposition(phi, theta, drive.period, alpha, U, defined)


def tan_phi_formula(drive):
    """``tan phi = |z x (d1 x d2)| / (d1 . d2)`` with the global phase folded so phi <= pi/2."""
    a, b = drive.d1.vector, drive.d2.vector
    cross = np.cross(a, b)
    num = np.hypot(cross[0], cross[1])
    return float(num / abs(a @ b)) if a @ b != 0 else np.inf


def effective_coupling(pd):
    return pd.phi / pd.period * np.exp(-1j * (pd.theta + np.pi / 2))


def effective_hamiltonian(pd):
    """Time-independent generator with ``exp(-i H_eff T)`` equal to the rotation part of ``U(T,0)``."""
    lam = effective_coupling(pd)
    return np.array([[0, lam], [np.conj(lam), 0]], dtype=complex)


def n_period_unitary(pd, n):
    """Closed form ``U(nT,0) = e^{i n alpha} (d'.sigma + cos(n phi) 1)``."""
    n = np.asarray(n)
    s = np.sin(n * pd.phi)
    dprime = (np.asarray(1j * s * np.sin(pd.theta)), np.asarray(-1j * s * np.cos(pd.theta)))
    U = (
        dprime[0][..., None, None] * SIGMA_X
        + dprime[1][..., None, None] * SIGMA_Y
        + np.asarray(np.cos(n * pd.phi))[..., None, None] * np.eye(2)
    )
    return np.asarray(np.exp(1j * n * pd.global_phase))[..., None, None] * U


def stroboscopic_propagator(drive, t, pd=None):
    """Exact ``U(t,0)`` at ``t = t' + nT`` from the closed forms.

    Vectorised over ``t``.
    """
    pd = pd or one_period_unitary(drive)
    t = np.asarray(t, dtype=float)
    T, t1 = drive.period, drive.t1
    n = np.floor(t / T)
    tp = t - n * T
    # guard against round-off putting t' just outside [0, T)
    over = tp >= T
    n = np.where(over, n + 1, n)
    tp = np.where(over, tp - T, tp)
    UnT = n_period_unitary(pd, n)
    first = tp <= t1
    U_a = su2_propagator(drive.d1, np.where(first, tp, t1))
    U_b = su2_propagator(drive.d2, np.where(first, 0.0, tp - t1))
    return U_b @ U_a @ UnT


def stroboscopic_state(drive, psi0, t, pd=None):
    psi0 = as_vector(psi0)
    psi = stroboscopic_propagator(drive, t, pd) @ psi0
    return QuantumState(psi, "pure", ("0", "1"))


def stroboscopic_trajectory(drive, psi0, times, pd=None):
    """Closed-form trajectory sampled at arbitrary times."""
    psi0 = as_vector(psi0)
    times = np.asarray(times, dtype=float)
    states = (stroboscopic_propagator(drive, times, pd) @ psi0[:, None])[..., 0]
    pops = np.abs(states) ** 2
    obs = {"P0": pops[:, 0], "P1": pops[:, 1]}
    return Trajectory(times, obs, states, {"integrator": "closed-form"}, ("P0", "P1"))


def simulate(drive, psi0, times, noise=None, max_step=None):
    """RK4 simulation of the hard square well (the oracle path)."""
    times = np.asarray(times, dtype=float)
    return integrate_schrodinger(
        drive.hamiltonian(noise),
        psi0,
        times,
        breakpoints=drive.breakpoints(times[-1]),
        max_step=max_step,
        bound=drive.spectral_bound() if noise is None else None,
    )


def inversion_time(drive, m=None, pd=None):
    """Total time ``(4m+1) pi^2 (|d1|+|d2|) / (4 phi |d1||d2|)`` to reach |1> from |0>.

    ``m`` is the pulse-area index and defaults to the drive's own.
    """
    m = drive.m if m is None else m
    pd = pd or one_period_unitary(drive)
    if pd.phi <= 1e-15:
        raise InfiniteTime("phi = 0: the periodic drive produces no net rotation")
    n1, n2 = drive.d1.norm, drive.d2.norm
    return (4 * m + 1) * np.pi**2 * (n1 + n2) / (4 * pd.phi * n1 * n2)


def minimal_time_first_order(drive):
    """First-order estimate ``(pi^2/4) (D1+D2) / |D1 O2 - D2 O1|``."""
    D1, D2 = drive.detuning1, drive.detuning2
    O1, O2 = drive.coupling1, drive.coupling2
    den = abs(D1 * O2 - D2 * O1)
    if den == 0:
        raise DegenerateParameters("Delta1*Omega2 = Delta2*Omega1")
    return np.pi**2 / 4 * abs(D1 + D2) / den


def plateau_residual(drive, m, pd=None):
    """Relative residual of ``d1x sin(m phi) + d1z cos(m phi) = |d1|``.

    Vectorised over ``m``; small values mark parameter sets where P1 lingers
    near one after reaching it.
    """
    m = np.asarray(m)
    if np.any(m < 1):
        raise ValueError("m must be >= 1")
    pd = pd or one_period_unitary(drive)
    d1 = drive.d1
    lhs = d1.dx * np.sin(m * pd.phi) + d1.dz * np.cos(m * pd.phi)
    return np.abs(lhs - d1.norm) / d1.norm


def best_plateau_index(drive, m_max=200):
    m = np.arange(1, m_max + 1)
    res = plateau_residual(drive, m)
    k = int(np.argmin(res))
    return int(m[k]), float(res[k])


def fit_oscillation_frequency(times, p1, guess, span=0.5, points=2001):
    """Least-squares frequency ``w`` of ``sin^2(w t)`` fitted to ``p1``.

    Brute-force scan of ``w`` over ``guess * [1-span, 1+span]`` followed by a
    bounded scalar refinement around the best grid point.
    """
    from scipy.optimize import minimize_scalar

    times = np.asarray(times, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    grid = guess * np.linspace(1 - span, 1 + span, points)
    sse = ((np.sin(np.outer(grid, times)) ** 2 - p1) ** 2).sum(axis=1)
    k = int(np.argmin(sse))
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, points - 1)]
    res = minimize_scalar(lambda w: ((np.sin(w * times) ** 2 - p1) ** 2).sum(), bounds=(lo, hi), method="bounded")
    return float(res.x)
