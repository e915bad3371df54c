"""
Three-level (Lambda) and hub-coupled N-level systems under periodic fields.

Basis order is ``(|0>, |1>, |2>)`` with ``|2>`` the common upper level:

    H = [[0, 0, O1], [0, delta, O2], [O1, O2, Delta]]

With ``delta = 0`` only the bright combination ``(O1|0> + O2|1>)/r``,
``r = sqrt(O1^2 + O2^2)``, couples to ``|2>``, so the dynamics is an
effective two-level problem with ``y = sqrt(4 r^2 + Delta^2)``.  Alternating
two detunings with ``y_a t1 = y_b t2 = pi`` rotates population between
``|2>`` and the bright state by ``arctan|d2/d1|`` per period.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import QuantumState, Trajectory, expm_hermitian
from .errors import ClosedFormUnavailable, InfiniteTime, RatioMismatch

STORAGE_LABELS = ("0_1", "1_0", "2_0")


@dataclass(frozen=True)
class LambdaSystem:
    coupling1: float
    coupling2: float
    detuning: float
    delta: float = 0.0

    @property
    def y(self):
        return float(np.sqrt(4 * self.coupling1**2 + 4 * self.coupling2**2 + self.detuning**2))

    def hamiltonian(self):
        O1, O2 = self.coupling1, self.coupling2
        return np.array([[0, 0, O1], [0, self.delta, O2], [O1, O2, self.detuning]], dtype=complex)


def lambda_propagator(sys, t):
    """``exp(-iHt)``; closed form for ``delta = 0``, eigendecomposition otherwise.

    ``t`` may be an array; the result then has shape ``t.shape + (3, 3)``.
    """
    t = np.asarray(t, dtype=float)
    if sys.delta != 0:
        warnings.warn("no closed form for delta != 0; using eigendecomposition", ClosedFormUnavailable, stacklevel=2)
        return expm_hermitian(sys.hamiltonian(), t.ravel()).reshape(t.shape + (3, 3))
    O1, O2, D, y = sys.coupling1, sys.coupling2, sys.detuning, sys.y
    S = O1**2 + O2**2
    half = 0.5 * y * t
    c = np.cos(half) + 1j * (D / y) * np.sin(half)
    e = np.exp(0.5j * D * t)
    U = np.empty(t.shape + (3, 3), dtype=complex)
    if S == 0:
        U[...] = 0
        U[..., 0, 0] = U[..., 1, 1] = e
        U[..., 2, 2] = np.conj(c)
    else:
        U[..., 0, 0] = (O2**2 * e + O1**2 * c) / S
        U[..., 0, 1] = U[..., 1, 0] = O1 * O2 * (c - e) / S
        U[..., 1, 1] = (O1**2 * e + O2**2 * c) / S
        U[..., 0, 2] = U[..., 2, 0] = -2j * O1 / y * np.sin(half)
        U[..., 1, 2] = U[..., 2, 1] = -2j * O2 / y * np.sin(half)
        U[..., 2, 2] = np.cos(half) - 1j * (D / y) * np.sin(half)
    return np.exp(-0.5j * D * t)[..., None, None] * U


@dataclass(frozen=True)
class LambdaPeriodDecomposition:
    """Frequency-modulated Lambda system over one period ``T = t1 + t2``.

    ``varphi = arg(s1)`` with ``s1 = d1 + i d2``; the population moved per
    period is governed by ``rotation = arctan|d2/d1|``.
    """

    coupling1: float
    coupling2: float
    detuning_a: float
    detuning_b: float
    d1: float
    d2: float
    y_a: float
    y_b: float

    @property
    def s1(self):
        return complex(self.d1, self.d2)

    @property
    def s2(self):
        return complex(self.d1, -self.d2)

    @property
    def varphi(self):
        return float(np.arctan2(self.d2, self.d1))

    @property
    def rotation(self):
        return float(np.arctan2(abs(self.d2), abs(self.d1)))

    @property
    def t1(self):
        return np.pi / self.y_a

    @property
    def t2(self):
        return np.pi / self.y_b

    @property
    def period(self):
        return self.t1 + self.t2

    @property
    def phase(self):
        """Half the dynamic phase ``(Delta_a t1 + Delta_b t2)/2``."""
        return 0.5 * (self.detuning_a * self.t1 + self.detuning_b * self.t2)


def lambda_decomposition(O1, O2, Da, Db):
    S = O1**2 + O2**2
    return LambdaPeriodDecomposition(
        float(O1), float(O2), float(Da), float(Db),
        d1=float(-4 * S - Da * Db),
        d2=float(2 * (Da - Db) * np.sqrt(S)),
        y_a=float(np.sqrt(4 * S + Da**2)),
        y_b=float(np.sqrt(4 * S + Db**2)),
    )


def lambda_period_unitary(O1, O2, Da, Db):
    """Closed-form ``exp(-i H_b t2) exp(-i H_a t1)`` and its decomposition."""
    dec = lambda_decomposition(O1, O2, Da, Db)
    S = O1**2 + O2**2
    ya_yb = dec.y_a * dec.y_b
    ph = np.exp(1j * dec.phase)
    k = 4 * S + Da * Db
    B = np.empty((3, 3), dtype=complex)
    B[0, 0] = (ya_yb * O2**2 * ph - O1**2 * k) / S
    B[0, 1] = B[1, 0] = -(ya_yb * O1 * O2 * ph + O1 * O2 * k) / S
    B[1, 1] = (ya_yb * O1**2 * ph - O2**2 * k) / S
    B[0, 2] = 2 * O1 * (Db - Da)
    B[1, 2] = 2 * O2 * (Db - Da)
    B[2, 0], B[2, 1] = -B[0, 2], -B[1, 2]
    B[2, 2] = -k
    return np.exp(-1j * dec.phase) / ya_yb * B, dec


def lambda_n_period_amplitudes(dec, n):
    """Amplitudes after ``n`` periods starting from ``|2>``; shape ``n.shape + (3,)``."""
    n = np.asarray(n, dtype=float)
    r = np.hypot(dec.coupling1, dec.coupling2)
    # s1^n / (y_a y_b)^n with |s1| = y_a y_b
    u1 = np.exp(1j * n * dec.varphi)
    u2 = np.conj(u1)
    pre = np.exp(-1j * n * dec.phase)
    out = np.empty(n.shape + (3,), dtype=complex)
    out[..., 0] = pre * 1j * dec.coupling1 / (2 * r) * (u1 - u2)
    out[..., 1] = pre * 1j * dec.coupling2 / (2 * r) * (u1 - u2)
    out[..., 2] = pre * 0.5 * (u1 + u2)
    return out


def lambda_n_period_state(dec, n):
    return QuantumState(lambda_n_period_amplitudes(dec, n), "pure", ("0", "1", "2"))


def superposition_target(coupling1, coupling2):
    """The superposition reached from ``|2>``: ``(O1|0> + O2|1>)/r``."""
    v = np.array([coupling1, coupling2, 0.0], dtype=complex)
    return v / np.linalg.norm(v)


def superposition_time(theta, O1, O2, Da, Db, rtol=1e-9):
    """Time to carry ``|2>`` to the bright superposition of the two lower levels.

    Requires ``O1/O2 = tan(theta)``.  The result is
    ``pi/(2 rotation) * (t1 + t2)``, i.e. ``N`` periods with
    ``N rotation = pi/2``, not rounded to an integer.
    """
    if not np.isclose(np.tan(theta) * O2, O1, rtol=rtol, atol=1e-12):
        raise RatioMismatch(f"O1/O2 = {O1 / O2 if O2 else np.inf:g} but tan(theta) = {np.tan(theta):g}")
    dec = lambda_decomposition(O1, O2, Da, Db)
    if dec.rotation == 0:
        raise InfiniteTime("equal detunings: no rotation per period")
    return np.pi / (2 * dec.rotation) * dec.period


# --------------------------------------------------------------------------
# hub-coupled N-level generalisation


def hub_hamiltonian(couplings, detuning):
    """``N+1`` levels; the hub is the last one and couples to all others."""
    c = np.asarray(couplings, dtype=float)
    n = c.size
    H = np.zeros((n + 1, n + 1), dtype=complex)
    H[:n, n] = H[n, :n] = c
    H[n, n] = detuning
    return H


@dataclass
class SuperpositionResult:
    trajectory: Trajectory
    periods: int
    fidelity: float
    rotation: float
    target: np.ndarray


def n_level_superposition(couplings, Da, Db, t_max=None, n_periods=None):
    """Frequency-modulated hub system started in the hub level.

    The one-period unitary is the product of segment exponentials with
    ``y_j t_j = pi``, ``y_j = sqrt(4 S + Delta_j^2)`` and ``S = sum O_k^2``.
    The rotation per period is read off that product
    (``|U_hub,hub| = cos(rotation)``); the fidelity with the
    coupling-weighted superposition is evaluated after the integer number of
    periods closest to ``pi/(2 rotation)``.  The trajectory is sampled
    stroboscopically.
    """
    c = np.asarray(couplings, dtype=float)
    if c.size < 2:
        raise ValueError("at least two lower levels are required")
    S = float(np.sum(c**2))
    ya, yb = np.sqrt(4 * S + Da**2), np.sqrt(4 * S + Db**2)
    t1, t2 = np.pi / ya, np.pi / yb
    U = expm_hermitian(hub_hamiltonian(c, Db), t2) @ expm_hermitian(hub_hamiltonian(c, Da), t1)
    rotation = float(np.arccos(min(1.0, abs(U[-1, -1]))))
    if rotation == 0:
        raise InfiniteTime("equal detunings: no rotation per period")
    n_star = max(1, int(np.rint(np.pi / (2 * rotation))))
    T = t1 + t2
    if n_periods is None:
        n_periods = 2 * n_star if t_max is None else int(np.floor(t_max / T))
    n_periods = max(n_periods, n_star)
    psi = np.zeros(c.size + 1, dtype=complex)
    psi[-1] = 1.0
    states = np.empty((n_periods + 1, c.size + 1), dtype=complex)
    states[0] = psi
    for k in range(n_periods):
        psi = U @ psi
        states[k + 1] = psi
    target = np.append(c / np.sqrt(S), 0.0).astype(complex)
    fidelity = float(abs(np.vdot(target, states[n_star])) ** 2)
    labels = [str(i) for i in range(c.size + 1)]
    pops = np.abs(states) ** 2
    obs = {f"P{lab}": pops[:, i] for i, lab in enumerate(labels)}
    meta = {"integrator": "eigendecomposition", "period": T, "rotation": rotation}
    traj = Trajectory(np.arange(n_periods + 1) * T, obs, states, meta, tuple(obs))
    return SuperpositionResult(traj, n_star, fidelity, rotation, target)


# --------------------------------------------------------------------------
# general two-segment schedules (detuning, delta or coupling switched)


@dataclass(frozen=True)
class Segment:
    coupling1: float
    coupling2: float
    detuning: float
    delta: float = 0.0

    @property
    def system(self):
        return LambdaSystem(self.coupling1, self.coupling2, self.detuning, self.delta)

    @property
    def y(self):
        return self.system.y


@dataclass(frozen=True)
class ThreeLevelSchedule:
    """Two alternating segments.

    Durations default to the half-period rule ``y_j t_j = pi`` with
    ``y_j = sqrt(4 O1^2 + 4 O2^2 + Delta_j^2)`` of each segment; ``t1`` and
    ``t2`` override them.
    """

    first: Segment
    second: Segment
    t1: float | None = None
    t2: float | None = None

    @property
    def durations(self):
        t1 = np.pi / self.first.y if self.t1 is None else float(self.t1)
        t2 = np.pi / self.second.y if self.t2 is None else float(self.t2)
        if t1 <= 0 or t2 <= 0:
            raise ValueError("segment durations must be positive")
        return t1, t2

    @property
    def period(self):
        return sum(self.durations)

    @property
    def closed_form(self):
        return self.first.delta == 0 and self.second.delta == 0

    def segment_propagators(self, t_first, t_second):
        if self.closed_form:
            return lambda_propagator(self.first.system, t_first), lambda_propagator(self.second.system, t_second)
        return (expm_hermitian(self.first.system.hamiltonian(), t_first),
                expm_hermitian(self.second.system.hamiltonian(), t_second))

    def period_unitary(self):
        t1, t2 = self.durations
        Ua, Ub = self.segment_propagators(np.array([t1]), np.array([t2]))
        return Ub[0] @ Ua[0]

    def hamiltonian(self):
        """Callable ``H(t)`` for direct integration."""
        t1 = self.durations[0]
        T = self.period
        Ha, Hb = self.first.system.hamiltonian(), self.second.system.hamiltonian()
        return lambda t: Ha if (t % T) < t1 else Hb


def three_level_modulated_evolution(schedule, psi0, times, labels=("0", "1", "2")):
    """Exact piecewise-constant propagation sampled at ``times``.

    Each sample is ``U_partial(t mod T) U(T)^n psi0``.  With ``delta = 0`` in
    both segments the segment propagators use the closed form; otherwise
    they come from the eigendecomposition oracle, and ``metadata["path"]``
    records which was used.
    """
    times = np.asarray(times, dtype=float)
    psi0 = np.asarray(psi0.data if isinstance(psi0, QuantumState) else psi0, dtype=complex)
    t1, t2 = schedule.durations
    T = t1 + t2
    UT = schedule.period_unitary()
    n = np.floor(times / T + 1e-12).astype(int)
    tm = np.clip(times - n * T, 0.0, T)
    strobe = np.empty((n.max() + 1, psi0.size), dtype=complex)
    strobe[0] = psi0
    for k in range(n.max()):
        strobe[k + 1] = UT @ strobe[k]
    in_first = tm < t1
    Ua, Ub = schedule.segment_propagators(np.where(in_first, tm, t1), np.where(in_first, 0.0, tm - t1))
    partial = np.where(in_first[:, None, None], Ua, Ub @ Ua)
    states = (partial @ strobe[n][..., None])[..., 0]
    pops = np.abs(states) ** 2
    obs = {f"P{lab}": pops[:, i] for i, lab in enumerate(labels)}
    meta = {
        "integrator": "piecewise-exact",
        "path": "closed-form" if schedule.closed_form else "oracle",
        "t1": t1,
        "t2": t2,
        "period": T,
    }
    return Trajectory(times, obs, states, meta, tuple(obs))


def photon_storage_evolution(schedule, times):
    """Atom-cavity relabelling of the three-level run started in ``|0,1>``.

    Atom level ``|0>`` with one cavity photon, ``|1>`` and ``|2>`` with none;
    the dynamics is the bare three-level evolution from ``|0>``.
    """
    psi0 = np.array([1, 0, 0], dtype=complex)
    return three_level_modulated_evolution(schedule, psi0, times, labels=STORAGE_LABELS)


def scan_segment_durations(schedule, psi0, target, t1_values, t2_values, n_max=400):
    """Best stroboscopic population of ``target`` over a grid of durations.

    Returns ``(population, t1, t2, periods)`` tuples sorted best first.  Used
    to choose durations where the half-period rule gives no transfer.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    Ha, Hb = schedule.first.system.hamiltonian(), schedule.second.system.hamiltonian()
    Ua = expm_hermitian(Ha, np.asarray(t1_values, float))
    Ub = expm_hermitian(Hb, np.asarray(t2_values, float))
    U = Ub[None, :] @ Ua[:, None]
    w, V = np.linalg.eig(U)
    coef = np.linalg.solve(V, np.broadcast_to(psi0, U.shape[:-1])[..., None])[..., 0]
    weights = V[..., target, :] * coef
    best = np.zeros(U.shape[:2])
    best_n = np.zeros(U.shape[:2], dtype=int)
    power = np.ones_like(w)
    for k in range(1, n_max + 1):
        power = power * w
        pop = np.abs(np.sum(weights * power, axis=-1)) ** 2
        better = pop > best
        best = np.where(better, pop, best)
        best_n = np.where(better, k, best_n)
    out = []
    for i, a in enumerate(t1_values):
        for j, b in enumerate(t2_values):
            out.append((float(best[i, j]), float(a), float(b), int(best_n[i, j])))
    out.sort(key=lambda r: -r[0])
    return out
