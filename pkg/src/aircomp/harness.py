"""Monte Carlo experiment harness: config, sweep driver, result output.

An experiment fixes the system parameters and sweeps at most one of
transmit power, normalized region size, or antenna count. Per sweep
point and scheme, ``trials`` random scenarios are drawn; the movable and
fixed-array schemes see identical scenarios at the same trial index, so
their comparison is paired. Everything is keyed off (master_seed,
trial_index): results do not depend on execution order.
"""

import json
from dataclasses import dataclass, field, fields, replace

import numpy as np
import yaml

from .channel import generate_scenario, ula_positions
from .errors import ConfigError, PlacementInfeasibleError
from .numerics import SeedSpec, derive_trial_stream
from .optimizer import OptimizerConfig, alternating_minimize

_SWEEPABLE = ("power_dbm", "region_over_lambda", "N")
_CSV_FIELDS = ("sweep_name", "sweep_value", "scheme", "mean_mse", "median_mse",
               "std_mse", "mean_mse_per_k", "trials", "mean_outer_iters")


@dataclass
class ExperimentConfig:
    """Experiment parameters; power_dbm, region_over_lambda, and N accept
    either a scalar or a sweep list (at most one may be a list)."""

    K: int = 4
    N: int | list = 4
    L: int = 4
    path_loss_db: float = -100.0
    noise_dbm: float = -100.0
    power_dbm: float | list = 15.0
    region_over_lambda: float | list = 4.0
    wavelength: float = 0.1
    min_spacing_over_lambda: float = 0.5
    trials: int = 100
    master_seed: int = 0
    scheme: str = "both"
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def __post_init__(self):
        _require_int(self.K, "K", minimum=1)
        _require_int(self.L, "L", minimum=1)
        _require_int(self.trials, "trials", minimum=1)
        _require_int(self.master_seed, "master_seed", minimum=0)
        if self.master_seed >= 2 ** 64:
            raise ConfigError("master_seed must fit in 64 unsigned bits")
        _require_number_or_sweep(self.N, "N", integral=True)
        _require_number_or_sweep(self.power_dbm, "power_dbm")
        _require_number_or_sweep(self.region_over_lambda, "region_over_lambda",
                                 positive=True)
        _require_positive(self.wavelength, "wavelength")
        if not isinstance(self.min_spacing_over_lambda, (int, float)) \
                or isinstance(self.min_spacing_over_lambda, bool) \
                or self.min_spacing_over_lambda < 0:
            raise ConfigError("min_spacing_over_lambda must be a non-negative number")
        if self.scheme not in ("ma", "fpa", "both"):
            raise ConfigError(f"scheme must be ma, fpa, or both, got {self.scheme!r}")
        n_sweeps = sum(isinstance(getattr(self, name), list) for name in _SWEEPABLE)
        if n_sweeps > 1:
            raise ConfigError("at most one of power_dbm, region_over_lambda, N "
                              "may be a sweep list")


def _require_int(value, key, minimum):
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"{key} must be an integer >= {minimum}, got {value!r}")


def _require_positive(value, key):
    if not isinstance(value, (int, float)) or isinstance(value, bool) \
            or not value > 0:
        raise ConfigError(f"{key} must be a positive number, got {value!r}")


def _require_number_or_sweep(value, key, integral=False, positive=False):
    def check_one(v):
        ok_type = isinstance(v, int) and not isinstance(v, bool) if integral \
            else isinstance(v, (int, float)) and not isinstance(v, bool)
        if not ok_type:
            raise ConfigError(f"{key} entries must be "
                              f"{'integers' if integral else 'numbers'}, got {v!r}")
        if integral and v < 1:
            raise ConfigError(f"{key} must be >= 1, got {v!r}")
        if positive and not v > 0:
            raise ConfigError(f"{key} must be positive, got {v!r}")

    if isinstance(value, list):
        if not value:
            raise ConfigError(f"{key} sweep list must be non-empty")
        for v in value:
            check_one(v)
        if not all(a < b for a, b in zip(value, value[1:])):
            raise ConfigError(f"{key} sweep list must be strictly increasing")
    else:
        check_one(value)


# yaml 1.1 reads unpadded scientific notation ("1e-5") as a string, so
# these fields get a best-effort float coercion with a named error
_FLOAT_KEYS = ("path_loss_db", "noise_dbm", "power_dbm", "region_over_lambda",
               "wavelength", "min_spacing_over_lambda")
_OPT_FLOAT_KEYS = ("outer_rel_tol", "armijo_c", "step_shrink", "init_step")


def _coerce_float(value, key):
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{key} must be a number, got {value!r}") from None
    return value


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a validated config from parsed file content."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    kwargs = dict(data)
    for key in _FLOAT_KEYS:
        if key in kwargs:
            value = kwargs[key]
            if isinstance(value, list):
                kwargs[key] = [_coerce_float(v, key) for v in value]
            else:
                kwargs[key] = _coerce_float(value, key)
    if "optimizer" in kwargs:
        opt = kwargs["optimizer"]
        if not isinstance(opt, dict):
            raise ConfigError("optimizer must be a mapping")
        opt_known = {f.name for f in fields(OptimizerConfig)}
        opt_unknown = set(opt) - opt_known
        if opt_unknown:
            raise ConfigError(f"unknown config key optimizer.{sorted(opt_unknown)[0]!r}")
        opt = {k: (_coerce_float(v, f"optimizer.{k}") if k in _OPT_FLOAT_KEYS
                   else v) for k, v in opt.items()}
        try:
            kwargs["optimizer"] = OptimizerConfig(**opt)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"optimizer: {exc}") from exc
    return ExperimentConfig(**kwargs)


def parse_config(path) -> ExperimentConfig:
    """Read and validate a YAML config file; empty files mean 'all defaults'."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    return config_from_dict(data)


@dataclass
class SweepResult:
    """Aggregated statistics for one (sweep value, scheme) cell.

    ``error`` is set (and the statistics are NaN with trials=0) when the
    point could not run, e.g. because the antennas do not fit the region.
    ``trial_records`` keeps the per-trial outcomes for dumps.
    """

    sweep_name: str
    sweep_value: float
    scheme: str
    mean_mse: float
    median_mse: float
    std_mse: float
    mean_mse_per_k: float
    trials: int
    mean_outer_iters: float
    error: str | None = field(default=None, compare=False)
    trial_records: list = field(default_factory=list, repr=False, compare=False)

    def record(self) -> dict:
        return {name: getattr(self, name) for name in _CSV_FIELDS}


def resolve_sweep(cfg: ExperimentConfig):
    """(name, values) of the swept field; scalars become a 1-point power sweep."""
    for name in _SWEEPABLE:
        value = getattr(cfg, name)
        if isinstance(value, list):
            return name, list(value)
    return "power_dbm", [cfg.power_dbm]


def run_experiment(cfg: ExperimentConfig) -> list:
    """Run all sweep points and schemes; one SweepResult per (value, scheme).

    A placement-infeasible sweep point is reported with its error set and
    the remaining points still run. Trials are independent, pure
    functions of (master_seed, trial_index) and can execute in any order.
    """
    sweep_name, values = resolve_sweep(cfg)
    schemes = ("ma", "fpa") if cfg.scheme == "both" else (cfg.scheme,)
    results = []
    for value in values:
        point_cfg = replace(cfg, **{sweep_name: value})
        for scheme in schemes:
            results.append(_run_point(point_cfg, sweep_name, value, scheme))
    return results


def _run_point(cfg: ExperimentConfig, sweep_name: str, sweep_value,
               scheme: str) -> SweepResult:
    mses, iters, records = [], [], []
    try:
        for t in range(cfg.trials):
            mse, outer_iters, positions = run_trial(cfg, t, scheme)
            mses.append(mse)
            iters.append(outer_iters)
            records.append({
                "sweep_name": sweep_name,
                "sweep_value": float(sweep_value),
                "scheme": scheme,
                "trial": t,
                "mse": mse,
                "outer_iters": outer_iters,
                "positions": positions,
            })
    except PlacementInfeasibleError as exc:
        nan = float("nan")
        return SweepResult(sweep_name, float(sweep_value), scheme,
                           nan, nan, nan, nan, 0, nan, error=str(exc))
    arr = np.asarray(mses)
    std = float(np.std(arr, ddof=1)) if cfg.trials > 1 else 0.0
    return SweepResult(
        sweep_name=sweep_name,
        sweep_value=float(sweep_value),
        scheme=scheme,
        mean_mse=float(np.mean(arr)),
        median_mse=float(np.median(arr)),
        std_mse=std,
        mean_mse_per_k=float(np.mean(arr)) / cfg.K,
        trials=cfg.trials,
        mean_outer_iters=float(np.mean(iters)),
        trial_records=records,
    )


def run_trial(cfg: ExperimentConfig, trial_index: int, scheme: str):
    """One optimization run; returns (final mse, outer iterations, positions).

    The scenario depends only on (master_seed, trial_index), so both
    schemes and all sweep points share channel realizations at equal
    trial indices. The optimizer draws from a child stream that never
    overlaps the scenario stream.
    """
    seed = SeedSpec(cfg.master_seed, trial_index)
    scenario = generate_scenario(cfg, seed)
    if scheme == "ma":
        stream = derive_trial_stream(seed).spawn(1)[0]
        report = alternating_minimize(scenario, cfg.optimizer, stream)
    elif scheme == "fpa":
        positions = np.array(ula_positions(cfg.N, cfg.wavelength / 2.0))
        report = alternating_minimize(scenario, cfg.optimizer, None,
                                      initial_positions=positions,
                                      optimize_positions=False)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    final = report.final
    return (report.mse_trace[-1], report.iterations,
            [[float(x), float(y)] for x, y in final.positions])


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def render_csv(results: list) -> str:
    lines = [",".join(_CSV_FIELDS)]
    for res in results:
        rec = res.record()
        lines.append(",".join(_fmt(rec[name]) for name in _CSV_FIELDS))
    return "\n".join(lines) + "\n"


def render_json(results: list) -> str:
    return json.dumps([res.record() for res in results], indent=2) + "\n"


def write_results(results: list, out_path, format: str = "csv") -> None:
    """Write aggregated results; CSV column order and formatting are fixed."""
    if not results:
        raise ValueError("results must be non-empty")
    if format == "csv":
        text = render_csv(results)
    elif format == "json":
        text = render_json(results)
    else:
        raise ValueError(f"unknown output format {format!r}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_trial_dump(results: list, out_path) -> None:
    """Write every per-trial record (incl. final positions) as a JSON array."""
    records = [rec for res in results for rec in res.trial_records]
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(records, fh, indent=2)
        fh.write("\n")


def power_margin_db(power_dbm, mse_ma, mse_fpa) -> float:
    """Horizontal gap between the two MSE-vs-power curves, in dB.

    Both curves are interpolated linearly in log10(MSE) against power;
    the gap is read at the midpoint of the overlapping MSE range and is
    positive when the fixed array needs more power for equal MSE.
    """
    p = np.asarray(power_dbm, dtype=float)
    ya = np.log10(np.asarray(mse_ma, dtype=float))
    yf = np.log10(np.asarray(mse_fpa, dtype=float))
    lo = max(ya.min(), yf.min())
    hi = min(ya.max(), yf.max())
    if not lo < hi:
        raise ValueError("MSE curves do not overlap; cannot read a margin")
    y_mid = 0.5 * (lo + hi)
    p_ma = float(np.interp(y_mid, ya[::-1], p[::-1]))
    p_fpa = float(np.interp(y_mid, yf[::-1], p[::-1]))
    return p_fpa - p_ma
