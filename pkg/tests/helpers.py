"""Shared builders for the test suite."""

import numpy as np

from aircomp.channel import PathParam, Scenario, SnChannelSpec, generate_scenario
from aircomp.harness import ExperimentConfig
from aircomp.numerics import SeedSpec
from aircomp.objective import Solution
from aircomp.optimizer import (OptimizerConfig, init_positions,
                               update_combiner, update_power)


def default_scenario(trial=0, seed=42, **overrides) -> Scenario:
    cfg = ExperimentConfig(**overrides)
    return generate_scenario(cfg, SeedSpec(seed, trial))


def synthetic_scenario(rng, k=2, n=3, l=2, mu=1.0, noise=0.05,
                       budgets=1.0, region=0.4, wavelength=0.1,
                       min_spacing=0.0) -> Scenario:
    """Hand-built scenario with O(1) channel scales for oracle tests."""
    sensors = []
    for _ in range(k):
        paths = [PathParam(rng.uniform(0, np.pi), rng.uniform(0, np.pi),
                           complex(rng.normal(), rng.normal()) / np.sqrt(2 * l))
                 for _ in range(l)]
        sensors.append(SnChannelSpec(paths=paths, path_loss_mu=mu))
    return Scenario(sensors=sensors, num_antennas=n, region_size=region,
                    wavelength=wavelength, min_spacing=min_spacing,
                    noise_power=noise,
                    power_budgets=np.full(k, float(budgets)))


def random_positions(scenario, rng) -> np.ndarray:
    pts = init_positions(scenario, OptimizerConfig(), rng, mode="random")
    return np.array(pts, dtype=float)


def warmed_solution(scenario, seed) -> Solution:
    """Random feasible positions plus one exact combiner/power sweep,
    so all decision variables sit at realistic magnitudes."""
    rng = np.random.default_rng(seed)
    sol = Solution(
        positions=random_positions(scenario, rng),
        powers=np.sqrt(scenario.power_budgets).astype(complex),
        combiner=np.zeros(scenario.num_antennas, dtype=complex),
    )
    sol.combiner = update_combiner(scenario, sol)
    for k in range(scenario.num_sensors):
        sol.powers[k] = update_power(scenario, sol, k)
    return sol
