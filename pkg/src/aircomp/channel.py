"""Multipath field-response channel model over a planar receive region.

Each sensor-to-receiver channel is a sum of plane waves. Path ``l`` of
sensor ``k`` contributes ``sqrt(mu_k) * sigma_kl * exp(-j*(2*pi/lam) *
r.T @ rho_kl)`` at receive position ``r``, where ``rho_kl = [sin(theta)*
cos(phi), cos(theta)]`` is the path's propagation vector. Moving an
antenna therefore re-phases the paths, which is the lever the position
optimizer pulls on.

All internal math is in linear units; dB/dBm conversion happens once,
in :func:`generate_scenario`.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .numerics import SeedSpec, derive_trial_stream, sample_complex_gaussian


class Position(NamedTuple):
    """Cartesian antenna position in meters."""

    x: float
    y: float


def db_to_linear(x_db: float) -> float:
    """dB -> linear power ratio."""
    return 10.0 ** (x_db / 10.0)


def dbm_to_watts(x_dbm: float) -> float:
    """dBm -> watts."""
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


@dataclass
class PathParam:
    """One propagation path: arrival angles and small-scale fading gain."""

    elevation_theta: float
    azimuth_phi: float
    gain_sigma: complex


@dataclass
class SnChannelSpec:
    """Multipath description of one sensor's channel.

    ``rho`` (L, 2) and ``amp`` (L,) hold the per-path propagation vectors
    and composite amplitudes sqrt(mu)*sigma, precomputed for fast gain
    evaluation.
    """

    paths: list
    path_loss_mu: float
    rho: np.ndarray = field(init=False, repr=False)
    amp: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.paths:
            raise ValueError("paths must be non-empty")
        if not self.path_loss_mu > 0:
            raise ValueError("path_loss_mu must be positive")
        self.rho = np.stack([propagation_vector(p) for p in self.paths])
        self.amp = np.sqrt(self.path_loss_mu) * np.array(
            [p.gain_sigma for p in self.paths], dtype=complex)


@dataclass
class Scenario:
    """One problem instance: channels, geometry, noise, and power budgets.

    The receive region is the square [0, region_size] x [0, region_size];
    only relative phases enter the channel, so anchoring at the origin is
    without loss of generality.
    """

    sensors: list
    num_antennas: int
    region_size: float
    wavelength: float
    min_spacing: float
    noise_power: float
    power_budgets: np.ndarray

    def __post_init__(self):
        if len(self.sensors) < 1:
            raise ValueError("need at least one sensor")
        if self.num_antennas < 1:
            raise ValueError("need at least one antenna")
        if not self.region_size > 0:
            raise ValueError("region_size must be positive")
        if not self.wavelength > 0:
            raise ValueError("wavelength must be positive")
        if self.min_spacing < 0:
            raise ValueError("min_spacing must be non-negative")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be positive")
        self.power_budgets = np.asarray(self.power_budgets, dtype=float)
        if self.power_budgets.shape != (len(self.sensors),):
            raise ValueError("power_budgets must have one entry per sensor")
        if not np.all(self.power_budgets > 0):
            raise ValueError("power budgets must be positive")
        self._stack = None

    @property
    def num_sensors(self) -> int:
        return len(self.sensors)

    def path_stack(self):
        """(rho_all, amp_all, offsets): all sensors' paths concatenated.

        ``offsets`` are reduceat boundaries, one per sensor, so per-sensor
        sums over the flat arrays come out of a single numpy call.
        """
        if self._stack is None:
            rho_all = np.concatenate([s.rho for s in self.sensors])
            amp_all = np.concatenate([s.amp for s in self.sensors])
            counts = [len(s.paths) for s in self.sensors]
            offsets = np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(np.intp)
            self._stack = (rho_all, amp_all, offsets)
        return self._stack


def propagation_vector(path: PathParam) -> np.ndarray:
    """Unit-sphere projection [sin(theta)cos(phi), cos(theta)] of a path."""
    t, p = path.elevation_theta, path.azimuth_phi
    return np.array([np.sin(t) * np.cos(p), np.cos(t)])


def channel_gain(spec: SnChannelSpec, r, wavelength: float) -> complex:
    """Complex channel gain of one sensor at receive position ``r``."""
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    r = np.asarray(r, dtype=float)
    phases = spec.rho @ r
    return complex(spec.amp @ np.exp(-2j * np.pi / wavelength * phases))


def channel_vector(spec: SnChannelSpec, positions, wavelength: float) -> np.ndarray:
    """Channel gains of one sensor at each antenna position, shape (N,)."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if pos.size == 0:
        raise ValueError("positions must be non-empty")
    phases = spec.rho @ pos.T
    return spec.amp @ np.exp(-2j * np.pi / wavelength * phases)


def channel_matrix(scenario: Scenario, positions) -> np.ndarray:
    """All sensors' gains at all positions, shape (K, N); row k is h_k."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    rho_all, amp_all, offsets = scenario.path_stack()
    phases = rho_all @ pos.T
    terms = amp_all[:, None] * np.exp(-2j * np.pi / scenario.wavelength * phases)
    return np.add.reduceat(terms, offsets, axis=0)


def channel_gradient(spec: SnChannelSpec, r, wavelength: float) -> np.ndarray:
    """Spatial gradient d h / d r at position ``r``, shape (2,) complex.

    Each path contributes its own plane-wave derivative
    ``-j*(2*pi/lam) * rho * exp(-j*(2*pi/lam) * r.T @ rho)``.
    """
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    r = np.asarray(r, dtype=float)
    c = 2.0 * np.pi / wavelength
    terms = spec.amp * np.exp(-1j * c * (spec.rho @ r))
    return -1j * c * (terms @ spec.rho)


def ula_positions(num_antennas: int, spacing: float) -> list:
    """Uniform linear array along the x-axis: ((n-1)*spacing, 0)."""
    if num_antennas < 1:
        raise ValueError("num_antennas must be at least 1")
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    return [Position(n * spacing, 0.0) for n in range(num_antennas)]


def generate_scenario(cfg, seed: SeedSpec) -> Scenario:
    """Draw a random scenario from an experiment configuration.

    Per sensor: L path angles theta, phi independent uniform on [0, pi]
    and small-scale gains CN(0, 1/L). The draw order (theta block, phi
    block, gain block, sensor by sensor) is fixed so a given SeedSpec
    always produces the same scenario.

    ``cfg`` must carry scalar power_dbm / region_over_lambda values; the
    sweep harness resolves sweep lists before calling in here.
    """
    for name in ("power_dbm", "region_over_lambda", "N"):
        if isinstance(getattr(cfg, name), (list, tuple, np.ndarray)):
            raise ConfigError(f"{name} must be a scalar when generating a scenario")
    stream = derive_trial_stream(seed)
    mu = db_to_linear(cfg.path_loss_db)
    sensors = []
    for _ in range(cfg.K):
        thetas = stream.uniform(0.0, np.pi, size=cfg.L)
        phis = stream.uniform(0.0, np.pi, size=cfg.L)
        gains = sample_complex_gaussian(stream, 1.0 / cfg.L, size=cfg.L)
        paths = [PathParam(t, p, complex(g))
                 for t, p, g in zip(thetas, phis, gains)]
        sensors.append(SnChannelSpec(paths=paths, path_loss_mu=mu))
    lam = cfg.wavelength
    return Scenario(
        sensors=sensors,
        num_antennas=cfg.N,
        region_size=cfg.region_over_lambda * lam,
        wavelength=lam,
        min_spacing=cfg.min_spacing_over_lambda * lam,
        noise_power=dbm_to_watts(cfg.noise_dbm),
        power_budgets=np.full(cfg.K, dbm_to_watts(cfg.power_dbm)),
    )
