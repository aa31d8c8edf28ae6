"""Robust MSE minimization for over-the-air computation with a fluid antenna array."""

from .model import (
    AntennaPositions,
    ChannelSet,
    ConfigError,
    ContractError,
    FeasibilityError,
    Solution,
    SystemConfig,
    build_channels,
    draw_user_geometry,
    random_config,
    sample_perturbed_channels,
    uniform_positions,
)
from .objective import MseBreakdown, mse_analytic, mse_monte_carlo
from .solvers import (
    BcdSettings,
    BcdTrace,
    NumericalError,
    barrier_value,
    bcd_solve,
    placement_gradient,
    placement_objective,
    solve_beamformer,
    solve_positions,
    solve_power,
    solve_transceiver_fixed_positions,
)
from .experiments import (
    Scheme,
    SweepBase,
    SweepResult,
    SweepSpec,
    read_results,
    run_scheme,
    run_sweep,
    write_results,
)
from .seeding import derive_seed

__version__ = "0.1.0"

__all__ = [
    "AntennaPositions",
    "BcdSettings",
    "BcdTrace",
    "ChannelSet",
    "ConfigError",
    "ContractError",
    "FeasibilityError",
    "MseBreakdown",
    "NumericalError",
    "Scheme",
    "Solution",
    "SweepBase",
    "SweepResult",
    "SweepSpec",
    "SystemConfig",
    "barrier_value",
    "bcd_solve",
    "build_channels",
    "derive_seed",
    "draw_user_geometry",
    "mse_analytic",
    "mse_monte_carlo",
    "placement_gradient",
    "placement_objective",
    "random_config",
    "read_results",
    "run_scheme",
    "run_sweep",
    "sample_perturbed_channels",
    "solve_beamformer",
    "solve_positions",
    "solve_power",
    "solve_transceiver_fixed_positions",
    "uniform_positions",
    "write_results",
]
