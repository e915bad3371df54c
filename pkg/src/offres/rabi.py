"""
Quantum Rabi model without the rotating-wave approximation.

    H = omega_b a^+ a + (omega0/2) sigma_z + Omega sigma_x (a^+ + a)

in a truncated Fock basis ordered ``|g,0>, |e,0>, |g,1>, |e,1>, ...``, so
``|f,n>`` sits at index ``2n + f`` with ``f = 0`` for ``g``.  By default the
coupling matrix element between ``|f,n>`` and ``|1-f,n+-1>`` is the bare
``Omega`` of the explicit matrix; ``bosonic=True`` restores the
``sqrt(n)`` ladder factors.  With ``drop_top_excited`` (default) the basis
ends at ``|g,n_max>``, giving ``2 n_max + 1`` states.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .core import DRIFT_LIMIT, Trajectory, expm_hermitian
from .errors import DimensionMismatch, StepTooLarge, TruncationLeak, TruncationTooTight

#: Largest tolerated Poisson tail beyond ``n_max``.
DEFICIT_LIMIT = 1e-6
#: Largest tolerated rise of the top Fock level population during a run.
LEAK_LIMIT = 1e-4


@dataclass(frozen=True)
class RabiSystem:
    omega0: float
    omega_b: float
    n_max: int = 51
    drop_top_excited: bool = True
    bosonic: bool = False

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError("n_max must be a positive integer")

    @property
    def dim(self):
        return 2 * (self.n_max + 1) - int(self.drop_top_excited)

    @property
    def detuning(self):
        """``Delta = omega_b - omega0``."""
        return self.omega_b - self.omega0

    def labels(self):
        return [f"{'ge'[i % 2]}{i // 2}" for i in range(self.dim)]


def build_rabi_hamiltonian(sys, coupling):
    D = sys.dim
    idx = np.arange(D)
    n = idx // 2
    f = idx % 2
    H = np.diag(np.where(f == 1, 0.5, -0.5) * sys.omega0 + n * sys.omega_b).astype(complex)
    # |f,n> <-> |1-f,n+1> sits at (2n+f, 2n+3-f)
    for i in range(D):
        j = 2 * (n[i] + 1) + (1 - f[i])
        if j < D:
            g = coupling * (np.sqrt(n[i] + 1) if sys.bosonic else 1.0)
            H[i, j] = H[j, i] = g
    return H


# --------------------------------------------------------------------------
# field states


@dataclass(frozen=True)
class FieldState:
    """Photon-number distribution ``p_n``, optionally with pure amplitudes."""

    probabilities: np.ndarray
    kind: str
    deficit: float = 0.0
    amplitudes: np.ndarray | None = None

    @property
    def n_max(self):
        return len(self.probabilities) - 1

    def mean(self):
        return float(np.arange(len(self.probabilities)) @ self.probabilities)


def coherent_field(mean, n_max, pure=False):
    """Poisson photon statistics truncated at ``n_max`` and renormalised.

    ``pure=True`` gives the coherent pure state with real amplitudes
    ``sqrt(p_n)`` instead of the diagonal mixture.
    """
    if mean < 0:
        raise ValueError("mean photon number must be non-negative")
    n = np.arange(n_max + 1)
    p = poisson.pmf(n, mean) if mean > 0 else (n == 0).astype(float)
    deficit = float(poisson.sf(n_max, mean)) if mean > 0 else 0.0
    if deficit > DEFICIT_LIMIT:
        raise TruncationTooTight(f"Poisson tail beyond n_max={n_max} is {deficit:.3g} > {DEFICIT_LIMIT:g}")
    p = p / p.sum()
    amps = np.sqrt(p).astype(complex) if pure else None
    return FieldState(p, "coherent", deficit, amps)


def random_field(seed, n_max):
    """Uniform random weights on ``[0, 1]`` per Fock level, normalised."""
    w = np.random.default_rng(seed).uniform(0.0, 1.0, n_max + 1)
    return FieldState(w / w.sum(), "random")


def custom_field(probabilities):
    p = np.asarray(probabilities, dtype=float)
    if np.any(p < 0):
        raise ValueError("probabilities must be non-negative")
    return FieldState(p / p.sum(), "custom")


def initial_factor(sys, field, atom0="g"):
    """``W`` with ``rho(0) = W W^+`` for the product state atom x field."""
    if field.n_max != sys.n_max:
        raise DimensionMismatch(f"field has n_max={field.n_max}, system {sys.n_max}")
    f = {"g": 0, "e": 1}[atom0]
    rows = 2 * np.arange(sys.n_max + 1) + f
    keep = rows < sys.dim
    if field.amplitudes is not None:
        W = np.zeros((sys.dim, 1), dtype=complex)
        W[rows[keep], 0] = field.amplitudes[keep]
        return W / np.linalg.norm(W)
    W = np.zeros((sys.dim, int(keep.sum())), dtype=complex)
    W[rows[keep], np.arange(W.shape[1])] = np.sqrt(field.probabilities[keep])
    return W / np.linalg.norm(W)


# --------------------------------------------------------------------------
# marginals


def _layout(dim):
    if dim < 2:
        raise DimensionMismatch("composite space needs at least two states")
    return (dim - 1) // 2 if dim % 2 else dim // 2 - 1


def _diagonal(rho):
    rho = np.asarray(rho)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise DimensionMismatch("expected a square density matrix")
    return np.real(np.diagonal(rho, axis1=-2, axis2=-1))


def photon_distribution(rho):
    """``p_n`` (partial trace over the atom), shape ``(..., n_max + 1)``."""
    return photon_distribution_from_diagonal(_diagonal(rho))


def atom_populations(rho):
    """``(P_g, P_e)`` (partial trace over the field)."""
    d = _diagonal(rho)
    _layout(d.shape[-1])
    return atom_populations_from_diagonal(d)


# --------------------------------------------------------------------------
# dynamics


@dataclass(frozen=True)
class RabiDrive:
    """Constant coupling, or square-well intensity modulation between two values.

    Segment durations follow the two-level rule ``|d_j| t_j = pi/2`` with
    ``d_j = (Omega_j, 0, Delta/2)``.
    """

    coupling1: float
    coupling2: float | None = None

    @property
    def modulated(self):
        return self.coupling2 is not None

    def durations(self, detuning):
        if not self.modulated:
            return None
        t1 = np.pi / (2 * np.hypot(self.coupling1, detuning / 2))
        t2 = np.pi / (2 * np.hypot(self.coupling2, detuning / 2))
        return t1, t2


def _propagators(sys, drive, times):
    """Yield ``U(t)`` for each sample time (sorted), exactly for piecewise-constant H."""
    H1 = build_rabi_hamiltonian(sys, drive.coupling1)
    if not drive.modulated:
        w, V = np.linalg.eigh(H1)
        for t in times:
            yield (V * np.exp(-1j * w * t)) @ V.conj().T
        return
    H2 = build_rabi_hamiltonian(sys, drive.coupling2)
    t1, t2 = drive.durations(sys.detuning)
    T = t1 + t2
    U1, U2 = expm_hermitian(H1, t1), expm_hermitian(H2, t2)
    w1, V1 = np.linalg.eigh(H1)
    w2, V2 = np.linalg.eigh(H2)
    UT = U2 @ U1
    strobe = np.eye(sys.dim, dtype=complex)
    n_done = 0
    for t in times:
        n = int(np.floor(t / T + 1e-12))
        while n_done < n:
            strobe = UT @ strobe
            n_done += 1
        tm = min(max(t - n * T, 0.0), T)
        if tm < t1:
            part = (V1 * np.exp(-1j * w1 * tm)) @ V1.conj().T
        else:
            part = (V2 * np.exp(-1j * w2 * (tm - t1))) @ V2.conj().T @ U1
        yield part @ strobe


def rabi_evolution(sys, field, drive, times, atom0="g", method="factor", leak_limit=LEAK_LIMIT):
    """Atom and photon marginals of ``rho(t) = U(t) rho(0) U(t)^+``.

    The Hamiltonian is piecewise constant, so ``U(t)`` is assembled exactly
    from segment eigendecompositions.  ``method="factor"`` propagates
    ``W`` with ``rho = W W^+`` (a single column for pure inputs);
    ``method="density"`` propagates ``rho`` itself.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be sorted")
    W0 = initial_factor(sys, field, atom0)
    rho0 = W0 @ W0.conj().T
    diag = np.empty((len(times), sys.dim))
    for k, U in enumerate(_propagators(sys, drive, times)):
        if method == "factor":
            W = U @ W0
            diag[k] = np.sum(np.abs(W) ** 2, axis=1)
        elif method == "density":
            diag[k] = np.real(np.einsum("ij,jk,ik->i", U, rho0, U.conj()))
        else:
            raise ValueError(f"unknown method {method!r}")
    return _rabi_trajectory(sys, field, times, diag, method, leak_limit)


def rabi_evolution_rk4(sys, field, drive, times, atom0="g", max_step=None, leak_limit=LEAK_LIMIT):
    """Liouville-equation RK4 reference (small ``n_max`` only)."""
    from .core import commutator_rhs, integrate_liouville

    W0 = initial_factor(sys, field, atom0)
    H1 = build_rabi_hamiltonian(sys, drive.coupling1)
    if drive.modulated:
        H2 = build_rabi_hamiltonian(sys, drive.coupling2)
        t1, t2 = drive.durations(sys.detuning)
        T = t1 + t2

        def H(t):
            return H1 if (t % T) < t1 else H2

        n = int(np.ceil(times[-1] / T)) + 1
        knots = np.concatenate([np.arange(n) * T, np.arange(n) * T + t1])
        bound = max(np.abs(np.linalg.eigvalsh(H1)).max(), np.abs(np.linalg.eigvalsh(H2)).max())
    else:
        def H(t):
            return H1

        knots = ()
        bound = np.abs(np.linalg.eigvalsh(H1)).max()
    traj = integrate_liouville(commutator_rhs(H), W0 @ W0.conj().T, times, breakpoints=knots,
                               max_step=max_step, bound=bound)
    diag = np.real(np.diagonal(traj.states, axis1=-2, axis2=-1))
    return _rabi_trajectory(sys, field, np.asarray(times, float), diag, "rk4", leak_limit)


def _rabi_trajectory(sys, field, times, diag, method, leak_limit):
    trace = diag.sum(axis=1)
    drift = float(np.abs(trace - 1).max())
    if drift > DRIFT_LIMIT:
        raise StepTooLarge(f"trace drift {drift:.3g}")
    pg, pe = atom_populations_from_diagonal(diag)
    pn = photon_distribution_from_diagonal(diag)
    # rise of the top level above its initial weight (random fields start with some)
    leak = float((pn[:, -1] - pn[0, -1]).max())
    if leak > leak_limit:
        raise TruncationLeak(f"top Fock level gained population {leak:.3g} > {leak_limit:g}")
    obs = {"Pg": pg, "Pe": pe}
    obs.update({f"p{n}": pn[:, n] for n in range(pn.shape[1])})
    meta = {
        "integrator": "piecewise-exact" if method != "rk4" else "rk4",
        "method": method,
        "dimension": sys.dim,
        "trace_drift": drift,
        "top_level_population": leak,
        "deficit": field.deficit,
    }
    return Trajectory(times, obs, None, meta, ("Pg", "Pe"))


def atom_populations_from_diagonal(diag):
    diag = np.asarray(diag)
    return diag[..., 0::2].sum(axis=-1), diag[..., 1::2].sum(axis=-1)


def photon_distribution_from_diagonal(diag):
    diag = np.asarray(diag)
    n_max = _layout(diag.shape[-1])
    out = np.zeros(diag.shape[:-1] + (n_max + 1,))
    out[..., : (diag.shape[-1] + 1) // 2] += diag[..., 0::2]
    out[..., : diag.shape[-1] // 2] += diag[..., 1::2]
    return out


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
