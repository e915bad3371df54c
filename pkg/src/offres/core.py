"""
Small-dimension quantum dynamics primitives.

Everything here works in dimensionless units: frequencies are multiples of a
reference coupling Omega and times are in units of 1/Omega.

The fixed-step RK4 integrators are deliberately simple.  They act as the
brute-force reference against which every closed-form propagator in the
package is checked, so they never renormalise the state: norm or trace drift
is reported and, above ``DRIFT_LIMIT``, raised as :class:`StepTooLarge`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, NonHermitianInput, StepTooLarge

#: Default step rule: ``max|eig H| * h <= STEP_RULE``.
STEP_RULE = 1e-2
#: Norm/trace drift above which an integration is rejected.
DRIFT_LIMIT = 1e-6

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True)
class BlochHamiltonian:
    """Two-level Hamiltonian ``d . sigma + offset * 1``.

    The offset only contributes a global phase and is ignored by
    :func:`su2_propagator`.
    """

    dx: float
    dy: float
    dz: float
    offset: float = 0.0

    @property
    def vector(self):
        return np.array([self.dx, self.dy, self.dz], dtype=float)

    @property
    def norm(self):
        return float(np.sqrt(self.dx**2 + self.dy**2 + self.dz**2))

    @property
    def transverse(self):
        return float(np.hypot(self.dx, self.dy))

    def matrix(self, include_offset=False):
        H = self.dx * SIGMA_X + self.dy * SIGMA_Y + self.dz * SIGMA_Z
        if include_offset:
            H = H + self.offset * IDENTITY2
        return H


def _as_bloch(d):
    if isinstance(d, BlochHamiltonian):
        return d
    dx, dy, dz = (float(v) for v in d)
    return BlochHamiltonian(dx, dy, dz)


def su2_propagator(d, t):
    """Exact ``exp(-i d.sigma t)``.

    Written in terms of ``P = cos|d|t``, ``Q = dz sin(|d|t)/|d|`` and
    ``R = sqrt(dx^2+dy^2) sin(|d|t)/|d|`` with azimuth ``theta = atan2(dy, dx)``.
    ``t`` may be an array, in which case the result has shape ``t.shape + (2, 2)``.
    """
    d = _as_bloch(d)
    t = np.asarray(t, dtype=float)
    norm = d.norm
    P = np.cos(norm * t)
    # sin(|d| t)/|d| -> t as |d| -> 0
    s = t * np.sinc(norm * t / np.pi)
    Q = d.dz * s
    R = d.transverse * s
    theta = np.arctan2(d.dy, d.dx)
    U = np.empty(t.shape + (2, 2), dtype=complex)
    U[..., 0, 0] = P - 1j * Q
    U[..., 1, 1] = P + 1j * Q
    U[..., 0, 1] = -R * np.exp(-1j * (theta - np.pi / 2))
    U[..., 1, 0] = R * np.exp(1j * (theta - np.pi / 2))
    return U


def xz_exponential(ax, az):
    """``exp(-i (ax sigma_x + az sigma_z))`` for broadcastable real arrays."""
    ax, az = np.broadcast_arrays(np.asarray(ax, dtype=float), np.asarray(az, dtype=float))
    n = np.hypot(ax, az)
    c = np.cos(n)
    s = np.sinc(n / np.pi)
    M = np.empty(n.shape + (2, 2), dtype=complex)
    M[..., 0, 0] = c - 1j * s * az
    M[..., 1, 1] = c + 1j * s * az
    M[..., 0, 1] = -1j * s * ax
    M[..., 1, 0] = M[..., 0, 1]
    return M


def is_hermitian(H, atol=1e-12):
    H = np.asarray(H)
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    return bool(np.abs(H - np.swapaxes(H, -1, -2).conj()).max(initial=0.0) <= atol * scale)


def expm_hermitian(H, t):
    """``exp(-i H t)`` for Hermitian ``H`` via eigendecomposition.

    Either ``H`` is a single ``(d, d)`` matrix and ``t`` a scalar or 1-D array
    (result ``(len(t), d, d)``), or ``H`` is a stack ``(..., d, d)`` and ``t``
    broadcasts against the stack shape.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim < 2 or H.shape[-1] != H.shape[-2]:
        raise DimensionMismatch(f"expected square matrix, got shape {H.shape}")
    if not is_hermitian(H):
        raise NonHermitianInput("matrix is not Hermitian to 1e-12")
    H = 0.5 * (H + np.swapaxes(H, -1, -2).conj())
    w, V = np.linalg.eigh(H)
    t = np.asarray(t, dtype=float)
    if H.ndim == 2:
        phases = np.exp(-1j * np.multiply.outer(t, w))
        return (V * phases[..., None, :]) @ V.conj().T
    phases = np.exp(-1j * w * t[..., None])
    return (V * phases[..., None, :]) @ np.swapaxes(V, -1, -2).conj()


def rk4_propagator(H, t, steps):
    """Reference propagator for constant ``H`` by brute-force RK4 stepping.

    ``H`` may be a stack ``(..., d, d)``; ``t`` broadcasts against the stack.
    Each member takes ``steps`` equal steps of size ``t / steps``.
    """
    H = np.asarray(H, dtype=complex)
    t = np.asarray(t, dtype=float)
    h = (t / steps)[..., None, None]
    A = -1j * H
    U = np.broadcast_to(np.eye(H.shape[-1], dtype=complex), np.broadcast_shapes(H.shape, h.shape)).copy()
    for _ in range(steps):
        k1 = A @ U
        k2 = A @ (U + 0.5 * h * k1)
        k3 = A @ (U + 0.5 * h * k2)
        k4 = A @ (U + h * k3)
        U = U + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return U


# --------------------------------------------------------------------------
# states and trajectories


@dataclass(frozen=True)
class QuantumState:
    """Pure amplitudes or a density matrix over an ordered, labelled basis."""

    data: np.ndarray
    kind: str = "pure"
    labels: tuple = ()

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        if self.kind not in ("pure", "mixed"):
            raise ValueError(f"unknown state kind {self.kind!r}")
        dim = data.shape[-1]
        if self.kind == "mixed" and (data.ndim != 2 or data.shape[0] != dim):
            raise DimensionMismatch("density matrix must be square")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(dim)))
        elif len(self.labels) != dim:
            raise DimensionMismatch("one label per basis state required")

    @classmethod
    def basis(cls, index, dim, labels=()):
        v = np.zeros(dim, dtype=complex)
        v[index] = 1.0
        return cls(v, "pure", tuple(labels))

    @classmethod
    def from_density(cls, rho, labels=()):
        return cls(np.asarray(rho, dtype=complex), "mixed", tuple(labels))

    @property
    def dim(self):
        return self.data.shape[-1]

    def populations(self):
        if self.kind == "pure":
            return np.abs(self.data) ** 2
        return np.real(np.diagonal(self.data)).copy()

    def density(self):
        if self.kind == "mixed":
            return self.data
        return np.outer(self.data, self.data.conj())

    def check(self, atol=1e-10):
        """Raise ``ValueError`` if normalisation/positivity invariants fail."""
        if self.kind == "pure":
            norm = float(np.sum(np.abs(self.data) ** 2))
            if abs(norm - 1) > atol:
                raise ValueError(f"state norm {norm} differs from 1")
            return self
        rho = self.data
        if abs(np.trace(rho) - 1) > atol:
            raise ValueError("density matrix trace differs from 1")
        if not is_hermitian(rho, atol):
            raise ValueError("density matrix is not Hermitian")
        if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < -atol:
            raise ValueError("density matrix has negative eigenvalues")
        return self


def as_vector(state):
    if isinstance(state, QuantumState):
        if state.kind != "pure":
            raise ValueError("a pure state is required")
        return state.data
    return np.asarray(state, dtype=complex)


def as_density(state):
    if isinstance(state, QuantumState):
        return state.density()
    rho = np.asarray(state, dtype=complex)
    if rho.ndim == 1:
        return np.outer(rho, rho.conj())
    return rho


@dataclass
class Trajectory:
    """Sampled time series of named observables.

    ``population_keys`` lists the observables that are level populations and
    should sum to one for closed dynamics.
    """

    times: np.ndarray
    observables: dict
    states: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)
    population_keys: tuple = ()

    def __getitem__(self, name):
        return self.observables[name]

    def __len__(self):
        return len(self.times)

    @property
    def columns(self):
        return ["t", *self.observables]

    def population_sum(self):
        return sum(np.asarray(self.observables[k]) for k in self.population_keys)


def longest_interval_above(times, values, threshold):
    """Length and start of the longest run of consecutive samples above threshold."""
    best, best_start, start = 0.0, None, None
    for t, v in zip(times, values):
        if v > threshold:
            if start is None:
                start = t
            if t - start >= best:
                best, best_start = t - start, start
        else:
            start = None
    return best, best_start


# --------------------------------------------------------------------------
# fixed-step RK4


def _merge_knots(times, breakpoints):
    scale = 1e-12 * max(1.0, float(np.abs(times).max()))
    extra = [b for b in np.asarray(breakpoints, dtype=float).ravel() if times[0] < b < times[-1]]
    if extra:
        extra = np.asarray(extra)
        idx = np.clip(np.searchsorted(times, extra), 1, len(times) - 1)
        near = np.minimum(np.abs(times[idx] - extra), np.abs(times[idx - 1] - extra))
        extra = np.unique(extra[near > scale])
    knots = np.concatenate([times, extra]) if len(extra) else times.copy()
    is_out = np.concatenate([np.ones(len(times), bool), np.zeros(len(extra), bool)])
    order = np.argsort(knots, kind="stable")
    return knots[order], is_out[order]


def rk4_solve(f, y0, times, breakpoints=(), max_step=np.inf, post_step=None):
    """Integrate ``y' = f(t, y)`` with fixed-step RK4, returning ``y`` at ``times``.

    Steps never straddle an output time or a breakpoint.  Stage evaluations at
    the ends of each knot interval are nudged inside it by ~1e-10, so a
    right-continuous piecewise-constant ``f`` is integrated without splitting
    errors at its jumps.  Returns ``(states, n_steps)``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-D array")
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    knots, is_out = _merge_knots(times, breakpoints)
    y = np.array(y0, dtype=complex)
    out = np.empty((len(times),) + y.shape, dtype=complex)
    out[0] = y
    k_out = 1
    n_total = 0
    for a, b, record in zip(knots[:-1], knots[1:], is_out[1:]):
        span = b - a
        n = max(1, int(np.ceil(span / max_step - 1e-9)))
        h = span / n
        eta = min(1e-10 * max(1.0, abs(b)), 0.25 * h)
        for k in range(n):
            s = a + k * h
            ta = s + eta if k == 0 else s
            tb = s + h - eta if k == n - 1 else s + h
            tm = s + 0.5 * h
            k1 = f(ta, y)
            k2 = f(tm, y + (0.5 * h) * k1)
            k3 = f(tm, y + (0.5 * h) * k2)
            k4 = f(tb, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if post_step is not None:
                y = post_step(y)
        n_total += n
        if record:
            out[k_out] = y
            k_out += 1
    return out, n_total


def _spectral_bound(hamiltonian, times, breakpoints):
    probe = np.asarray(times, dtype=float)
    probe = np.concatenate([probe, 0.5 * (probe[1:] + probe[:-1]), np.asarray(breakpoints, float).ravel()])
    bound = 0.0
    for t in probe:
        H = np.asarray(hamiltonian(t))
        bound = max(bound, float(np.abs(np.linalg.eigvalsh(0.5 * (H + np.swapaxes(H, -1, -2).conj()))).max()))
    return bound


def _max_step(max_step, bound):
    if max_step is not None:
        return float(max_step)
    if bound is None:
        raise ValueError("either max_step or a spectral bound is required")
    return STEP_RULE / bound if bound > 0 else np.inf


def integrate_schrodinger(hamiltonian, psi0, times, *, breakpoints=(), max_step=None, bound=None, labels=()):
    """RK4 solution of ``i d|psi>/dt = H(t)|psi>`` sampled at ``times``.

    ``hamiltonian(t)`` returns a ``(d, d)`` matrix or a stack ``(B, d, d)``
    matching a batch of states ``psi0`` of shape ``(B, d)``.  Without
    ``max_step`` the step is ``STEP_RULE / bound``, where ``bound`` defaults to
    the largest |eigenvalue| seen at the output times, their midpoints and the
    breakpoints.
    """
    psi0 = as_vector(psi0)
    if max_step is None and bound is None:
        bound = _spectral_bound(hamiltonian, times, breakpoints)
    h = _max_step(max_step, bound)

    def f(t, y):
        return -1j * (hamiltonian(t) @ y[..., None])[..., 0]

    states, n_steps = rk4_solve(f, psi0, times, breakpoints, h)
    norms = np.sum(np.abs(states) ** 2, axis=-1)
    drift = float(np.abs(norms - norms[0]).max())
    if drift > DRIFT_LIMIT:
        raise StepTooLarge(f"norm drift {drift:.3g} exceeds {DRIFT_LIMIT:g}; reduce the step")
    dim = psi0.shape[-1]
    labels = tuple(labels) or tuple(str(i) for i in range(dim))
    pops = np.abs(states) ** 2
    observables = {f"P{lab}": pops[..., i] for i, lab in enumerate(labels)}
    meta = {"integrator": "rk4", "max_step": h, "steps": n_steps, "norm_drift": drift}
    return Trajectory(np.asarray(times, float), observables, states, meta, tuple(observables))


def commutator_rhs(hamiltonian):
    """Closed-system Liouville generator ``rho -> -i [H(t), rho]``."""

    def rhs(t, rho):
        H = hamiltonian(t)
        return -1j * (H @ rho - rho @ H)

    return rhs


def _symmetrize(rho):
    return 0.5 * (rho + np.swapaxes(rho, -1, -2).conj())


def integrate_liouville(rhs, rho0, times, *, breakpoints=(), max_step=None, bound=None, labels=()):
    """RK4 solution of ``d rho/dt = rhs(t, rho)``.

    The density matrix is re-symmetrised to be Hermitian after every step;
    nothing else is corrected.  ``bound`` is a bound on the generator's
    spectral radius (typically the largest |eigenvalue| of H plus the rates).
    """
    rho0 = as_density(rho0)
    h = _max_step(max_step, bound)
    states, n_steps = rk4_solve(rhs, rho0, times, breakpoints, h, post_step=_symmetrize)
    traces = np.real(np.trace(states, axis1=-2, axis2=-1))
    drift = float(np.abs(traces - traces[0]).max())
    if drift > DRIFT_LIMIT:
        raise StepTooLarge(f"trace drift {drift:.3g} exceeds {DRIFT_LIMIT:g}; reduce the step")
    dim = rho0.shape[-1]
    labels = tuple(labels) or tuple(str(i) for i in range(dim))
    pops = np.real(np.diagonal(states, axis1=-2, axis2=-1))
    observables = {f"P{lab}": pops[..., i] for i, lab in enumerate(labels)}
    meta = {"integrator": "rk4", "max_step": h, "steps": n_steps, "trace_drift": drift}
    return Trajectory(np.asarray(times, float), observables, states, meta, tuple(observables))


def step_halving_difference(run, max_step):
    """Max elementwise change of the sampled states when the step is halved.

    ``run(max_step)`` must return a :class:`Trajectory` with states.
    """
    a = run(max_step).states
    b = run(0.5 * max_step).states
    return float(np.abs(a - b).max())
