"""
Non-ideal drive shapes for the two-level system: logistic ("smooth")
square wells, seeded piecewise-constant noise, and Gaussian pulse trains.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import SIGMA_X, SIGMA_Z, STEP_RULE, as_vector, integrate_schrodinger, rk4_solve, xz_exponential
from .errors import IntegrationFailure, NoTransfer
from .twolevel import interaction_hamiltonian


class UniformNoise:
    """Piecewise-constant noise ``eps(t)`` drawn uniformly from ``[-a, a]``.

    One value is drawn per interval ``[knots[k], knots[k+1])`` (the integrator
    output steps).  Passing several seeds produces a batch: ``eps(t)`` then
    returns one value per seed, each stream reproducible on its own.
    """

    def __init__(self, amplitude, knots, seed):
        self.amplitude = float(amplitude)
        self.knots = np.asarray(knots, dtype=float)
        seeds = np.atleast_1d(seed)
        self.batched = np.ndim(seed) > 0
        cols = [np.random.default_rng(int(s)).uniform(-self.amplitude, self.amplitude, len(self.knots)) for s in seeds]
        self.values = np.stack(cols, axis=1)

    def __call__(self, t):
        k = np.clip(np.searchsorted(self.knots, t, side="right") - 1, 0, len(self.knots) - 1)
        row = self.values[k]
        return row if self.batched else row[..., 0]


@dataclass(frozen=True)
class SmoothSquareWell:
    """Logistic approximation to the intensity-modulated square well.

    The coupling sits at ``coupling1`` around ``t = 0 (mod T)`` and at
    ``coupling2`` in the middle of the period, with edges at ``t1/2`` and
    ``T - t1/2`` whose sharpness is set by ``hardness`` (gamma).
    """

    coupling1: float
    coupling2: float
    detuning: float
    hardness: float

    def __post_init__(self):
        if not self.hardness > 0:
            raise ValueError("hardness must be positive")

    @property
    def t1(self):
        return np.pi / (2 * interaction_hamiltonian(self.coupling1, self.detuning).norm)

    @property
    def t2(self):
        return np.pi / (2 * interaction_hamiltonian(self.coupling2, self.detuning).norm)

    @property
    def period(self):
        return self.t1 + self.t2

    def _scalar_value(self, t):
        T, t1, g = self.period, self.t1, self.hardness
        t = math.fmod(t, T)
        x = -g * (t - t1 / 2) if t < T / 2 else g * (t - T + t1 / 2)
        # 1/(1+e^{-x}) without overflow
        w = 1.0 / (1.0 + math.exp(-x)) if x >= 0 else math.exp(x) / (1.0 + math.exp(x))
        return self.coupling2 + (self.coupling1 - self.coupling2) * w

    def value(self, t):
        if isinstance(t, float) and t >= 0:
            return self._scalar_value(t)
        t = np.mod(np.asarray(t, dtype=float), self.period)
        T, t1, g = self.period, self.t1, self.hardness
        step = self.coupling1 - self.coupling2
        first = expit(-g * (t - t1 / 2))
        second = expit(g * (t - T + t1 / 2))
        return self.coupling2 + step * np.where(t < T / 2, first, second)

    def hard_value(self, t):
        """The ``gamma -> infinity`` limit: a perfect well with the same centring."""
        t = np.mod(np.asarray(t, dtype=float), self.period)
        inside = (t < self.t1 / 2) | (t >= self.period - self.t1 / 2)
        return np.where(inside, self.coupling1, self.coupling2)

    def hamiltonian(self, noise=None, hard=False):
        half_dz = 0.5 * self.detuning
        shape = self.hard_value if hard else self.value

        Hz = half_dz * SIGMA_Z

        def H(t):
            c = shape(t)
            if noise is not None:
                c = c + np.asarray(noise(t))
            return np.asarray(c)[..., None, None] * SIGMA_X + Hz

        return H

    def breakpoints(self, t_max, resolution=0.1, reach=20.0):
        """Dense knots through each logistic edge so RK4 resolves the 1/gamma scale."""
        w = resolution / self.hardness
        half = min(reach / self.hardness, self.period / 4)
        offsets = np.arange(-half, half + w / 2, w)
        n = int(np.ceil(t_max / self.period)) + 1
        centers = np.concatenate([self.t1 / 2 + np.arange(n) * self.period,
                                  self.period - self.t1 / 2 + np.arange(n) * self.period])
        pts = (centers[:, None] + offsets[None, :]).ravel()
        return np.sort(pts[(pts > 0) & (pts < t_max)])

    def spectral_bound(self, noise_amplitude=0.0):
        top = max(abs(self.coupling1), abs(self.coupling2)) + noise_amplitude
        return float(np.hypot(top, self.detuning / 2))


def smooth_field_value(field, t, noise=None):
    v = field.value(t)
    return v + noise(t) if noise is not None else v


def simulate_smooth(field, psi0, times, noise=None, noise_amplitude=0.0, hard=False):
    """RK4 run of the logistic well, or of its hard limit when ``hard`` is set."""
    times = np.asarray(times, dtype=float)
    if hard:
        n = int(np.ceil(times[-1] / field.period)) + 1
        k = np.arange(n) * field.period
        knots = np.concatenate([k + field.t1 / 2, k + field.period - field.t1 / 2])
    elif 0.1 / field.hardness < STEP_RULE / field.spectral_bound(noise_amplitude):
        knots = field.breakpoints(times[-1])
    else:
        knots = ()
    return integrate_schrodinger(
        field.hamiltonian(noise, hard),
        psi0,
        times,
        breakpoints=knots,
        bound=field.spectral_bound(noise_amplitude),
    )


# --------------------------------------------------------------------------
# Gaussian trains


#: Step rule ``max|eig| h`` for the Magnus product.
MAGNUS_STEP_RULE = 0.1
#: Largest Magnus step in ``s = t/xi``; resolves the unit-width envelope of weak pulses.
MAGNUS_ENVELOPE_STEP = 0.02

# fourth-order commutator-free Magnus weights on the two Gauss nodes
_C1, _C2 = 0.5 - np.sqrt(3) / 6, 0.5 + np.sqrt(3) / 6
_W1, _W2 = (3 - 2 * np.sqrt(3)) / 12, (3 + 2 * np.sqrt(3)) / 12


def gaussian_period_unitaries(amplitude, width, detuning, max_step=None, method="magnus"):
    """One-pulse unitaries ``U(8 xi, 0)`` for a batch of Gaussian pulses.

    Arguments broadcast against each other.  Time is rescaled to
    ``s = t/xi`` on ``[0, 8]`` so every member of the batch shares one step
    grid; the traceless Hamiltonian
    ``A exp(-(t-4xi)^2/2xi^2) sigma_x + (Delta/2) sigma_z`` is used.

    ``method="magnus"`` (default) multiplies fourth-order commutator-free
    Magnus steps, each a product of two exact SU(2) exponentials, so the
    result is unitary by construction; its step obeys
    ``max|eig| h <= MAGNUS_STEP_RULE`` and ``h <= MAGNUS_ENVELOPE_STEP``
    (error below ~5e-9 against an adaptive ODE solution).
    ``method="rk4"`` is the plain RK4 oracle at ``STEP_RULE``.  A
    ``max_step`` more than ten times the method's rule raises
    :class:`IntegrationFailure`.
    """
    A, xi, D = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (amplitude, width, detuning)))
    shape = A.shape
    ox = (xi * A).ravel()
    oz = (0.5 * xi * D).ravel()
    bound = float(np.max(np.hypot(ox, oz), initial=0.0))
    rule = (STEP_RULE if method == "rk4" else MAGNUS_STEP_RULE)
    rule = rule / bound if bound > 0 else 8.0
    if method == "magnus":
        rule = min(rule, MAGNUS_ENVELOPE_STEP)
    if max_step is None:
        h = rule
    elif max_step > 10 * rule:
        raise IntegrationFailure(f"step {max_step:g} breaks the step rule (limit {rule:g})")
    else:
        h = float(max_step)
    n = max(1, int(np.ceil(8.0 / h - 1e-9)))
    h = 8.0 / n
    if method == "rk4":
        Hb = np.zeros((ox.size, 2, 2), dtype=complex)
        Hb[:, 0, 0] = oz
        Hb[:, 1, 1] = -oz

        def f(s, U):
            g = ox * np.exp(-0.5 * (s - 4.0) ** 2)
            Hb[:, 0, 1] = g
            Hb[:, 1, 0] = g
            return -1j * (Hb @ U)

        U0 = np.broadcast_to(np.eye(2, dtype=complex), (ox.size, 2, 2))
        states, _ = rk4_solve(f, U0, np.array([0.0, 8.0]), max_step=h)
        return states[-1].reshape(shape + (2, 2))
    if method != "magnus":
        raise ValueError(f"unknown method {method!r}")
    U = np.broadcast_to(np.eye(2, dtype=complex), (ox.size, 2, 2)).copy()
    for k in range(n):
        s = k * h
        g1 = np.exp(-0.5 * (s + _C1 * h - 4.0) ** 2)
        g2 = np.exp(-0.5 * (s + _C2 * h - 4.0) ** 2)
        first = xz_exponential(h * ox * (_W2 * g1 + _W1 * g2), h * oz * 0.5)
        second = xz_exponential(h * ox * (_W1 * g1 + _W2 * g2), h * oz * 0.5)
        U = second @ (first @ U)
    return U.reshape(shape + (2, 2))


@dataclass(frozen=True)
class GaussianTrain:
    """Repeated Gaussian pulses ``A exp(-(t-4 xi)^2 / 2 xi^2)`` truncated at ``T = 8 xi``.

    The one-pulse unitary is stored as ``[[P - iQ, -R e^{i theta}], [R e^{-i theta}, P + iQ]]``
    with ``cos(vartheta) = P``.
    """

    amplitude: float
    width: float
    detuning: float
    P: float
    Q: float
    R: float
    theta: float
    vartheta: float
    unitary: np.ndarray

    @property
    def period(self):
        return 8.0 * self.width

    def n_pulse_unitary(self, n):
        """Closed-form ``U(nT, 0)``."""
        s = np.sin(n * self.vartheta)
        c = np.cos(n * self.vartheta)
        norm = np.hypot(self.Q, self.R)
        if norm == 0:
            return np.eye(2, dtype=complex) * c
        q, r = self.Q / norm, self.R / norm
        return np.array(
            [[c - 1j * q * s, -r * s * np.exp(1j * self.theta)],
             [r * s * np.exp(-1j * self.theta), c + 1j * q * s]],
            dtype=complex,
        )

    def hamiltonian(self):
        A, xi, hz = self.amplitude, self.width, 0.5 * self.detuning
        T = self.period

        def H(t):
            s = (t % T) - 4 * xi
            g = A * np.exp(-0.5 * (s / xi) ** 2)
            return g * SIGMA_X + hz * SIGMA_Z

        return H

    def simulate(self, n_pulses, psi0=(1, 0), samples_per_pulse=8):
        """Direct RK4 simulation over ``n_pulses`` periods."""
        times = np.linspace(0, n_pulses * self.period, n_pulses * samples_per_pulse + 1)
        bound = float(np.hypot(self.amplitude, self.detuning / 2))
        return integrate_schrodinger(self.hamiltonian(), as_vector(np.asarray(psi0, complex)), times,
                                     breakpoints=np.arange(1, n_pulses) * self.period, bound=bound)


def rotation_parameters(U):
    """``(P, Q, R, theta, vartheta)`` of SU(2) matrices, vectorised."""
    P = 0.5 * (U[..., 0, 0] + U[..., 1, 1]).real
    Q = -0.5 * (U[..., 0, 0] - U[..., 1, 1]).imag
    R = np.abs(U[..., 1, 0])
    theta = -np.angle(U[..., 1, 0])
    vartheta = np.arccos(np.clip(P, -1.0, 1.0))
    return P, Q, R, theta, vartheta


def gaussian_decomposition(amplitude, width, detuning, max_step=None, method="magnus"):
    if not (amplitude >= 0 and width > 0):
        raise ValueError("amplitude must be >= 0 and width > 0")
    U = gaussian_period_unitaries(amplitude, width, detuning, max_step, method)
    P, Q, R, theta, vartheta = rotation_parameters(U)
    if abs(P**2 + Q**2 + R**2 - 1) > 1e-9:
        raise IntegrationFailure("one-pulse unitary left SU(2); decrease the step")
    return GaussianTrain(float(amplitude), float(width), float(detuning), float(P), float(Q), float(R),
                         float(theta), float(vartheta), U)


def inversion_pulse_count(vartheta, m=0):
    """``N = (4m+1) pi / (2 vartheta)`` before rounding."""
    return (4 * m + 1) * np.pi / (2 * np.asarray(vartheta, dtype=float))


def predicted_transfer(Q, R, vartheta, n):
    """``|<1|U(nT,0)|0>|^2 = R^2/(Q^2+R^2) sin^2(n vartheta)``."""
    QR = np.asarray(Q) ** 2 + np.asarray(R) ** 2
    frac = np.divide(np.asarray(R) ** 2, QR, out=np.zeros_like(QR, dtype=float), where=QR > 0)
    return frac * np.sin(n * np.asarray(vartheta)) ** 2


def pulses_for_inversion(train, m=0):
    """Rounded pulse count and the infidelity left by rounding and by ``Q != 0``."""
    if abs(train.R) < 1e-9 or train.vartheta <= 0:
        raise NoTransfer("R' vanishes: the pulse never couples |0> and |1>")
    N = max(1, int(np.rint(inversion_pulse_count(train.vartheta, m))))
    return N, float(1.0 - predicted_transfer(train.Q, train.R, train.vartheta, N))
