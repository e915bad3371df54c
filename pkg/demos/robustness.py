"""How the square-well transfer degrades: soft edges, coupling noise, decoherence.

    python3 demos/robustness.py
"""
import numpy as np

from offres.open_system import decoherence_sweep
from offres.pulses import SmoothSquareWell, UniformNoise, simulate_smooth
from offres.twolevel import SquareWellDrive, simulate


def soft_edges():
    t = np.linspace(0, 7.5, 751)
    print("logistic edges (couplings 1 and 3, detuning 50):")
    for gamma in (1e4, 300, 100, 50):
        p1 = simulate_smooth(SmoothSquareWell(1.0, 3.0, 50.0, gamma), [1, 0], t)["P1"]
        print(f"  hardness {gamma:>7g}: max P1 {p1.max():.5f}")


def coupling_noise(runs=100):
    drive = SquareWellDrive.intensity(1.0, 3.0, 50.0)
    t = np.linspace(0, 5, 1001)
    psi0 = np.tile([1.0, 0.0], (runs, 1))
    print(f"uniform coupling noise, {runs} seeds:")
    for amp in (0.05, 0.3):
        peaks = simulate(drive, psi0, t, noise=UniformNoise(amp, t, np.arange(runs)))["P1"].max(axis=0)
        print(f"  amplitude {amp}: peak P1 median {np.median(peaks):.5f}, lowest {peaks.min():.5f}")


def decoherence():
    drive = SquareWellDrive.frequency(1.0, 30.0, 300.0)
    x = np.array([0.0, 0.5, 1.0])
    sw = decoherence_sweep(drive, x, x, samples=201)
    print(f"P1 at the closed-system inversion time {sw.eval_time:.3f} (rows gamma01, columns gamma11):")
    for i, g in enumerate(x):
        print(f"  gamma01={g:.1f}: " + "  ".join(f"{v:.3f}" for v in sw.at_time[i]))


if __name__ == "__main__":
    soft_edges()
    coupling_noise()
    decoherence()
