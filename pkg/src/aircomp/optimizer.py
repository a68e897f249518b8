"""Alternating MSE minimization over combiner, powers, and antenna positions.

The variables split into K+N+1 blocks. Per outer iteration the loop
solves, in order:

  1. combiner u: closed form, the regularized least-squares solution
     u = (sum_k |w_k|^2 h_k h_k^H + noise_power I)^-1 (sum_k w_k h_k);
  2. each power factor w_k: closed-form constrained quadratic minimum on
     the disk |w_k|^2 <= p_k;
  3. each antenna position r_n: projected gradient ascent on the
     surrogate f_n inside the region, keeping pairwise spacing >= D.

Blocks 1 and 2 are exact minimizers of the MSE over their variables and
block 3 only accepts non-decreasing surrogate values, so the MSE trace is
non-increasing up to float rounding.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .channel import Position, Scenario, channel_vector, ula_positions
from .errors import FeasibilityError, PlacementInfeasibleError
from .numerics import hermitian_solve
from .objective import (Solution, _coeffs_from_matrix, _evaluator,
                        _mse_from_matrix, position_coeffs)

_SPACING_SLACK = 1e-12
_GRAD_TOL = 1e-9
_STEP_UNDERFLOW = 1e-9  # in units of wavelength


@dataclass
class OptimizerConfig:
    """Iteration caps, tolerances, and line-search/initialization knobs.

    ``init_step`` is in meters and defaults to wavelength/4 when None.
    ``init_mode`` is one of grid | random | ula-clipped. With
    ``multistarts`` > 1, the first start uses init_mode and the rest use
    random initialization (repeating a deterministic mode would just
    rerun the same start).
    """

    outer_max_iters: int = 200
    outer_rel_tol: float = 1e-6
    inner_max_iters: int = 100
    armijo_c: float = 1e-4
    step_shrink: float = 0.5
    init_step: float | None = None
    init_mode: str = "grid"
    multistarts: int = 1

    def __post_init__(self):
        if self.outer_max_iters < 1 or self.inner_max_iters < 1:
            raise ValueError("iteration caps must be at least 1")
        if not self.outer_rel_tol > 0:
            raise ValueError("outer_rel_tol must be positive")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must be in (0, 1)")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must be in (0, 1)")
        if self.init_step is not None and not self.init_step > 0:
            raise ValueError("init_step must be positive")
        if self.init_mode not in ("grid", "random", "ula-clipped"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")
        if self.multistarts < 1:
            raise ValueError("multistarts must be at least 1")


@dataclass
class OptimizeReport:
    """Result of one optimization run (best start when multistarts > 1)."""

    mse_trace: list
    final: Solution
    iterations: int
    converged: bool
    block_trace: list = field(default_factory=list, repr=False)


def update_combiner(scenario: Scenario, sol: Solution) -> np.ndarray:
    """Exact minimizer of the MSE over the combiner, other blocks fixed."""
    h_mat = _evaluator(scenario).matrix(sol.positions)
    return _combiner_from_matrix(h_mat, sol.powers, scenario.noise_power)


def _combiner_from_matrix(h_mat: np.ndarray, w: np.ndarray,
                          noise_power: float) -> np.ndarray:
    hc = h_mat.T  # columns are h_k
    gram = (hc * np.abs(w) ** 2) @ hc.conj().T
    gram += noise_power * np.eye(h_mat.shape[1])
    return hermitian_solve(gram, hc @ w)


def update_power(scenario: Scenario, sol: Solution, k: int) -> complex:
    """Exact minimizer of |u^H h_k w - 1|^2 on the disk |w|^2 <= p_k.

    With g = u^H h_k: the unconstrained optimum conj(g)/|g|^2 is feasible
    when |g|^2 >= 1/p_k; otherwise the optimum sits on the boundary at
    magnitude sqrt(p_k) with phase -arg(g). For g = 0 the objective is
    constant, and 0 is the minimum-energy choice.
    """
    if not 0 <= k < scenario.num_sensors:
        raise ValueError(f"sensor index {k} out of range")
    h_k = channel_vector(scenario.sensors[k], sol.positions, scenario.wavelength)
    g = complex(np.conj(sol.combiner) @ h_k)
    return _power_from_product(g, float(scenario.power_budgets[k]))


def _power_from_product(g: complex, p_k: float) -> complex:
    if g == 0:
        return 0j
    mag2 = (g.real * g.real + g.imag * g.imag)
    if mag2 >= 1.0 / p_k:
        return g.conjugate() / mag2
    return math.sqrt(p_k) * g.conjugate() / math.sqrt(mag2)


def check_feasible(scenario: Scenario, positions) -> bool:
    """True iff all points lie in the region and pairwise spacing >= D."""
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    a = scenario.region_size
    if np.any(pos < 0.0) or np.any(pos > a):
        return False
    return _spacing_ok(pos, scenario.min_spacing)


def _spacing_ok(pos: np.ndarray, min_spacing: float) -> bool:
    n = pos.shape[0]
    if n < 2 or min_spacing <= 0:
        return True
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt(np.sum(diff ** 2, axis=-1))
    dist[np.diag_indices(n)] = np.inf
    return bool(np.min(dist) >= min_spacing - _SPACING_SLACK)


def init_positions(scenario: Scenario, cfg: OptimizerConfig,
                   stream: np.random.Generator | None = None,
                   mode: str | None = None) -> list:
    """Feasible starting positions for the movable antennas.

    grid: square lattice with pitch max(D, A/ceil(sqrt(N))), centered in
    the region and clipped to it; random: rejection-sampled uniform
    points respecting the spacing; ula-clipped: half-wavelength ULA along
    the bottom edge.
    """
    mode = cfg.init_mode if mode is None else mode
    n, a, d = scenario.num_antennas, scenario.region_size, scenario.min_spacing
    if mode == "grid":
        side = int(np.ceil(np.sqrt(n)))
        pitch = max(d, a / side)
        span = (side - 1) * pitch
        start = max(0.0, (a - span) / 2.0)
        coords = np.clip(start + pitch * np.arange(side), 0.0, a)
        pts = [(coords[i % side], coords[i // side]) for i in range(n)]
        pos = np.array(pts, dtype=float)
        if not check_feasible(scenario, pos):
            raise PlacementInfeasibleError(
                f"grid placement of {n} antennas at spacing {d} does not fit "
                f"in a {a} x {a} region")
    elif mode == "random":
        if stream is None:
            raise ValueError("random initialization requires a stream")
        accepted = np.empty((0, 2))
        attempts = 0
        while accepted.shape[0] < n:
            if attempts >= 10 ** 5:
                raise PlacementInfeasibleError(
                    f"rejection sampling could not place {n} antennas at "
                    f"spacing {d} in a {a} x {a} region")
            cand = stream.uniform(0.0, a, size=2)
            attempts += 1
            if accepted.shape[0] == 0 or _spacing_ok(
                    np.vstack([accepted, cand]), d):
                accepted = np.vstack([accepted, cand])
        pos = accepted
    elif mode == "ula-clipped":
        spacing = scenario.wavelength / 2.0
        if (n - 1) * spacing > a:
            raise PlacementInfeasibleError(
                f"a {n}-element half-wavelength ULA exceeds the region edge {a}")
        pos = np.array(ula_positions(n, spacing), dtype=float)
        if not check_feasible(scenario, pos):
            raise PlacementInfeasibleError(
                "ula-clipped initialization violates the minimum spacing")
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return [Position(float(x), float(y)) for x, y in pos]


def _ascend(ev, coeffs, rx: float, ry: float, others: np.ndarray,
            region: float, min_spacing: float, cfg: OptimizerConfig,
            wavelength: float, start_step: float | None = None):
    """Projected gradient ascent on the surrogate for one antenna.

    Returns (x, y, last_accepted_step or None); the final surrogate value
    is never below the starting one. ``start_step`` warm-starts the
    backtracking scale (defaults to cfg.init_step).
    """
    init_step = cfg.init_step if cfg.init_step is not None else wavelength / 4.0
    min_step = _STEP_UNDERFLOW * wavelength
    c_re, c_im, d = ev.kernel_coeffs(coeffs)
    others = np.ascontiguousarray(np.atleast_2d(others), dtype=float) \
        if others.size else np.empty((0, 2))
    d_eff = max(min_spacing - _SPACING_SLACK, 0.0)
    rx, ry, accepted = _kernels.ascend_position(
        ev.rho_x, ev.rho_y, ev.amp_re, ev.amp_im, ev.bounds, c_re, c_im, d,
        ev.tpl, float(rx), float(ry),
        np.ascontiguousarray(others[:, 0]), np.ascontiguousarray(others[:, 1]),
        float(region), d_eff * d_eff, float(init_step),
        float(init_step if start_step is None else start_step),
        float(min_step), float(cfg.step_shrink), float(cfg.armijo_c),
        _GRAD_TOL, cfg.inner_max_iters)
    return float(rx), float(ry), (None if accepted < 0 else float(accepted))


def update_position(scenario: Scenario, sol: Solution, n: int,
                    cfg: OptimizerConfig) -> np.ndarray:
    """Projected gradient ascent on f_n for antenna n, shape (2,) result.

    Steps along the analytic gradient, clips to the region box, and
    backtracks (Armijo) until the clipped step gives sufficient increase;
    candidates closer than D to another antenna count as failed steps.
    Stops on the iteration cap, gradient-norm underflow, or step-size
    underflow. The returned point never has a lower f_n than the start.
    """
    if not check_feasible(scenario, sol.positions):
        raise FeasibilityError("update_position started from infeasible positions")
    coeffs = position_coeffs(scenario, sol, n)
    others = np.delete(sol.positions, n, axis=0)
    rx, ry, _ = _ascend(_evaluator(scenario), coeffs,
                        float(sol.positions[n, 0]), float(sol.positions[n, 1]),
                        others, scenario.region_size, scenario.min_spacing,
                        cfg, scenario.wavelength)
    return np.array([rx, ry])


def alternating_minimize(scenario: Scenario, cfg: OptimizerConfig,
                         stream: np.random.Generator | None = None,
                         initial_positions=None,
                         optimize_positions: bool = True) -> OptimizeReport:
    """Run the full block-coordinate loop, returning the best start.

    ``initial_positions`` overrides the configured initialization (used
    by the fixed-array baseline together with optimize_positions=False,
    in which case only the combiner and power blocks alternate and a
    single start runs). ``block_trace`` in the report holds the MSE
    after every individual block update within accepted outer iterations.
    """
    starts = cfg.multistarts if optimize_positions else 1
    if starts > 1 or (initial_positions is None and cfg.init_mode == "random"):
        if stream is None:
            raise ValueError("randomized initialization requires a stream")
    streams = stream.spawn(starts) if stream is not None else [None] * starts

    best = None
    for i in range(starts):
        mode = cfg.init_mode if i == 0 else "random"
        if initial_positions is not None and i == 0:
            positions = np.atleast_2d(np.asarray(initial_positions, dtype=float))
        else:
            positions = np.array(
                init_positions(scenario, cfg, streams[i], mode=mode), dtype=float)
        report = _single_start(scenario, cfg, positions, optimize_positions)
        if best is None or report.mse_trace[-1] < best.mse_trace[-1]:
            best = report
    return best


def _single_start(scenario: Scenario, cfg: OptimizerConfig,
                  positions: np.ndarray, optimize_positions: bool) -> OptimizeReport:
    num_k = scenario.num_sensors
    num_n = scenario.num_antennas
    noise = scenario.noise_power
    region = scenario.region_size
    min_spacing = scenario.min_spacing
    lam = scenario.wavelength
    if optimize_positions and not check_feasible(scenario, positions):
        raise FeasibilityError("infeasible starting positions")

    ev = _evaluator(scenario)
    pos = positions.astype(float).copy()
    w = np.sqrt(scenario.power_budgets).astype(complex)
    u = np.zeros(num_n, dtype=complex)
    h_mat = ev.matrix(pos)
    budgets = scenario.power_budgets
    init_step = cfg.init_step if cfg.init_step is not None else lam / 4.0
    min_step = _STEP_UNDERFLOW * lam
    warm = [init_step] * num_n

    mse_trace: list[float] = []
    block_trace: list[float] = []
    prev = np.inf
    converged = False
    iterations = 0

    for _ in range(cfg.outer_max_iters):
        iterations += 1
        u = _combiner_from_matrix(h_mat, w, noise)
        block_trace.append(_mse_from_matrix(h_mat, u, w, noise))
        products = h_mat @ np.conj(u)  # u^H h_k, fixed while w updates
        for k in range(num_k):
            w[k] = _power_from_product(complex(products[k]), float(budgets[k]))
            block_trace.append(_mse_from_matrix(h_mat, u, w, noise))
        if optimize_positions:
            for n in range(num_n):
                coeffs = _coeffs_from_matrix(h_mat, u, w, n)
                others = np.delete(pos, n, axis=0)
                rx, ry, accepted_step = _ascend(
                    ev, coeffs, float(pos[n, 0]), float(pos[n, 1]), others,
                    region, min_spacing, cfg, lam, start_step=warm[n])
                if accepted_step is not None:
                    pos[n, 0], pos[n, 1] = rx, ry
                    h_mat[:, n] = ev.gains(rx, ry)
                    warm[n] = min(init_step, accepted_step / cfg.step_shrink)
                else:
                    # nothing accepted: decay the warm step so repeated
                    # converged calls stay cheap, but keep it revivable
                    warm[n] = max(2.0 * min_step, warm[n] * cfg.step_shrink ** 6)
                block_trace.append(_mse_from_matrix(h_mat, u, w, noise))
        cur = block_trace[-1]
        mse_trace.append(cur)
        if prev - cur < cfg.outer_rel_tol * max(prev, 1e-300):
            converged = True
            break
        prev = cur

    sol = Solution(positions=pos, powers=w, combiner=u)
    return OptimizeReport(mse_trace=mse_trace, final=sol,
                          iterations=iterations, converged=converged,
                          block_trace=block_trace)
