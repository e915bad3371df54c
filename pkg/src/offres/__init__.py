"""Off-resonant population transfer by periodic modulation of the drive."""

__version__ = "0.1.0"

from .core import (  # noqa: E402, F401
    BlochHamiltonian,
    QuantumState,
    Trajectory,
    expm_hermitian,
    integrate_liouville,
    integrate_schrodinger,
    su2_propagator,
)
from .errors import (  # noqa: E402, F401
    ConfigError,
    DimensionMismatch,
    InfiniteTime,
    NoCandidate,
    NoTransfer,
    NumericalContractViolation,
    OffresError,
    StepTooLarge,
    TruncationLeak,
)
from .twolevel import (  # noqa: E402, F401
    SquareWellDrive,
    inversion_time,
    minimal_time_first_order,
    n_period_unitary,
    one_period_unitary,
    simulate,
    stroboscopic_propagator,
    stroboscopic_trajectory,
)
from .pulses import GaussianTrain, SmoothSquareWell, UniformNoise, gaussian_decomposition, simulate_smooth  # noqa: E402, F401
from .open_system import LindbladChannels, decoherence_sweep, evolve_open  # noqa: E402, F401
from .multilevel import (  # noqa: E402, F401
    LambdaSystem,
    Segment,
    ThreeLevelSchedule,
    lambda_period_unitary,
    lambda_propagator,
    n_level_superposition,
    three_level_modulated_evolution,
)
from .rabi import RabiDrive, RabiSystem, coherent_field, rabi_evolution, random_field  # noqa: E402, F401
from .optimize import SweepSpec, gaussian_search, scan_minimal_time, selectivity_map  # noqa: E402, F401
