"""
Driven two-level system with spontaneous emission and pure dephasing.

    d rho/dt = -i[H, rho] + L01(rho) + L11(rho)

with ``L01`` the decay |1> -> |0> at rate ``gamma01`` (jump operator
``sigma01 = |0><1|``) and ``L11`` pure dephasing at rate ``gamma11`` (jump
operator ``sigma11 = |1><1|``), which damps coherences at ``gamma11/2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import STEP_RULE, as_density, integrate_liouville
from .errors import DimensionMismatch, StepTooLarge
from .twolevel import inversion_time

SIGMA01 = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA11 = np.array([[0, 0], [0, 1]], dtype=complex)

#: Smallest density-matrix eigenvalue tolerated along a trajectory.
POSITIVITY_FLOOR = -1e-8


@dataclass(frozen=True)
class LindbladChannels:
    """Dissipation rate ``gamma01`` and dephasing rate ``gamma11``.

    Either may be an array, in which case the channels describe a batch of
    independent systems.
    """

    gamma01: float = 0.0
    gamma11: float = 0.0

    def __post_init__(self):
        if np.any(np.asarray(self.gamma01) < 0) or np.any(np.asarray(self.gamma11) < 0):
            raise ValueError("Lindblad rates must be non-negative")

    @property
    def total(self):
        return float(np.max(np.asarray(self.gamma01) + np.asarray(self.gamma11), initial=0.0))


def dissipator(rho, L, rate):
    """``(rate/2)(2 L rho L^+ - L^+L rho - rho L^+L)``; generic reference form."""
    Ld = np.swapaxes(L, -1, -2).conj()
    LdL = Ld @ L
    rate = np.asarray(rate, dtype=float)[..., None, None]
    return 0.5 * rate * (2 * L @ rho @ Ld - LdL @ rho - rho @ LdL)


def lindblad_rhs(rho, H, ch):
    """Right-hand side of the master equation for a (batch of) 2x2 ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    H = np.asarray(H, dtype=complex)
    if rho.shape[-2:] != (2, 2) or H.shape[-2:] != (2, 2):
        raise DimensionMismatch("the master equation is defined for 2x2 matrices")
    out = -1j * (H @ rho - rho @ H)
    # both dissipators written out for the 2x2 case
    g01 = np.asarray(ch.gamma01, dtype=float)
    damp = -0.5 * (g01 + np.asarray(ch.gamma11, dtype=float))
    decay = g01 * rho[..., 1, 1]
    out[..., 0, 0] += decay
    out[..., 1, 1] -= decay
    out[..., 0, 1] += damp * rho[..., 0, 1]
    out[..., 1, 0] += damp * rho[..., 1, 0]
    return out


def _liouville_step(drive, ch):
    return STEP_RULE / (drive.spectral_bound() + ch.total)


def evolve_open(drive, ch, rho0, times, max_step=None, verify=False):
    """Master-equation trajectory under a square-well drive.

    Array-valued channels evolve a batch: ``rho0`` is broadcast to it and
    each population series gains a trailing batch axis.  With ``verify`` the
    run is repeated at half the step and the largest change of the sampled
    states is stored as ``metadata["halving_difference"]``.
    """
    times = np.asarray(times, dtype=float)
    rho0 = as_density(rho0)
    batch = np.broadcast_shapes(np.shape(ch.gamma01), np.shape(ch.gamma11))
    rho0 = np.broadcast_to(rho0, batch + (2, 2)).copy()
    H = drive.hamiltonian()

    def rhs(t, rho):
        return lindblad_rhs(rho, H(t), ch)

    h = max_step or _liouville_step(drive, ch)

    def run(step):
        return integrate_liouville(rhs, rho0, times, breakpoints=drive.breakpoints(times[-1]),
                                   max_step=step, labels=("0", "1"))

    traj = run(h)
    floor = float(np.linalg.eigvalsh(traj.states).min())
    if floor < POSITIVITY_FLOOR:
        raise StepTooLarge(f"density matrix eigenvalue {floor:.3g} below {POSITIVITY_FLOOR:g}")
    traj.metadata["eigenvalue_floor"] = floor
    if verify:
        traj.metadata["halving_difference"] = float(np.abs(run(0.5 * h).states - traj.states).max())
    return traj


@dataclass
class DecoherenceSweep:
    """``P1`` over a (gamma01, gamma11) grid; rows follow gamma01."""

    gamma01: np.ndarray
    gamma11: np.ndarray
    eval_time: float
    at_time: np.ndarray
    peak: np.ndarray


def decoherence_sweep(drive, gamma01, gamma11, rho0=None, t_eval=None, samples=401):
    """Population of |1> over a grid of Lindblad rates.

    Two observables are returned because either could be meant: ``at_time``
    is ``P1(t_eval)`` (default: the closed-system inversion time) and
    ``peak`` is the maximum of ``P1`` over ``[0, 2 t_eval]``.  All grid
    points are integrated together as one batch.
    """
    g01 = np.asarray(gamma01, dtype=float).ravel()
    g11 = np.asarray(gamma11, dtype=float).ravel()
    if rho0 is None:
        rho0 = np.diag([1.0, 0.0]).astype(complex)
    t_eval = inversion_time(drive) if t_eval is None else float(t_eval)
    half = (samples - 1) // 2
    times = np.linspace(0.0, 2 * t_eval, 2 * half + 1)
    G01, G11 = np.meshgrid(g01, g11, indexing="ij")
    traj = evolve_open(drive, LindbladChannels(G01.ravel(), G11.ravel()), rho0, times)
    p1 = traj["P1"].reshape(len(times), *G01.shape)
    return DecoherenceSweep(g01, g11, t_eval, p1[half], p1.max(axis=0))

