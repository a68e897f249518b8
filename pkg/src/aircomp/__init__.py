"""Movable-antenna over-the-air computation: simulation and optimization."""

from .channel import (PathParam, Position, Scenario, SnChannelSpec,
                      channel_gain, channel_gradient, channel_matrix,
                      channel_vector, generate_scenario, propagation_vector,
                      ula_positions)
from .errors import ConfigError, FeasibilityError, PlacementInfeasibleError
from .harness import (ExperimentConfig, SweepResult, parse_config,
                      power_margin_db, run_experiment, write_results,
                      write_trial_dump)
from .numerics import (SeedSpec, derive_trial_stream, hermitian_solve,
                       sample_complex_gaussian)
from .objective import (PositionCoeffs, Solution, compute_mse, f_n, grad_f_n,
                        position_coeffs)
from .optimizer import (OptimizeReport, OptimizerConfig, alternating_minimize,
                        check_feasible, init_positions, update_combiner,
                        update_position, update_power)

__all__ = [
    "ConfigError", "ExperimentConfig", "FeasibilityError", "OptimizeReport",
    "OptimizerConfig", "PathParam", "PlacementInfeasibleError", "Position",
    "PositionCoeffs", "Scenario", "SeedSpec", "SnChannelSpec", "Solution",
    "SweepResult", "alternating_minimize", "channel_gain", "channel_gradient",
    "channel_matrix", "channel_vector", "check_feasible", "compute_mse",
    "derive_trial_stream", "f_n", "generate_scenario", "grad_f_n",
    "hermitian_solve", "init_positions", "parse_config", "position_coeffs",
    "power_margin_db", "propagation_vector", "run_experiment",
    "sample_complex_gaussian", "ula_positions", "update_combiner",
    "update_position", "update_power", "write_results", "write_trial_dump",
]

__version__ = "0.1.0"
