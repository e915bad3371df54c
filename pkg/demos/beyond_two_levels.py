"""Gaussian pulse trains, the Rabi model and three-level systems.

    python3 demos/beyond_two_levels.py
"""
import numpy as np

from offres.multilevel import (
    Segment,
    ThreeLevelSchedule,
    lambda_decomposition,
    n_level_superposition,
    superposition_time,
    three_level_modulated_evolution,
)
from offres.optimize import gaussian_search
from offres.rabi import RabiDrive, RabiSystem, coherent_field, rabi_evolution


def gaussian_trains():
    best = gaussian_search(2.0, (0.2, 3.0, 40), (0.2, 3.0, 40), pulses=5)[0]
    print(f"5-pulse Gaussian train at detuning 2: A={best.amplitude:.3f}, xi={best.width:.3f}, "
          f"simulated P1={best.simulated:.5f}")


def rabi_model():
    field = coherent_field(20.0, 51)
    const = rabi_evolution(RabiSystem(1.0, 1.0), field, RabiDrive(1.0), np.linspace(0, 20, 401))
    t = np.linspace(0, 5, 501)
    mod = rabi_evolution(RabiSystem(100.0, 400.0), field, RabiDrive(1.0, 3.0), t)
    k = int(np.argmax(mod["Pe"]))
    print(f"Rabi model, coherent field <n>=20: resonant constant drive max Pe {const['Pe'].max():.3f}; "
          f"modulated drive Pe {mod['Pe'][k]:.4f} at t={t[k]:.3f}")


def three_levels():
    dec = lambda_decomposition(1.0, 2.0, 50.0, 100.0)
    T = superposition_time(np.arctan(0.5), 1.0, 2.0, 50.0, 100.0)
    sch = ThreeLevelSchedule(Segment(1.0, 2.0, 50.0), Segment(1.0, 2.0, 100.0))
    traj = three_level_modulated_evolution(sch, [0, 0, 1], np.arange(80) * sch.period)
    k = int(np.argmin(traj["P2"]))
    print(f"Lambda system from |2>: rotation {dec.rotation:.5f}/period, superposition after {T:.4f}; "
          f"P0={traj['P0'][k]:.4f} P1={traj['P1'][k]:.4f} P2={traj['P2'][k]:.1e}")
    res = n_level_superposition([1.0, 2.0, 2.0, 1.0], 40.0, 80.0)
    print(f"hub with four lower levels: fidelity {res.fidelity:.5f} after {res.periods} periods")


if __name__ == "__main__":
    gaussian_trains()
    rabi_model()
    three_levels()
