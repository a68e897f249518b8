"""Computation-MSE objective and the per-antenna surrogate it decomposes into.

The distortion of the combined estimate is

    MSE = sum_k |u^H h_k w_k - 1|^2 + noise_power * ||u||^2.

Holding everything but antenna n's position fixed, the MSE is, up to a
constant, the negative of the surrogate

    f_n(r) = sum_k ( 2 Re{ conj(h_k(r)) c_kn } - d_kn |h_k(r)|^2 ),

with coefficients c_kn, d_kn depending only on the combiner, the power
factors, and the other antennas' gains. Maximizing f_n over r is exactly
minimizing the MSE over that antenna's position, which is what the
position block of the optimizer does. Coefficients are computed once per
antenna update (O(K*N)) and reused for every candidate position
(O(K*L) per evaluation).
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .channel import Scenario, channel_matrix


@dataclass
class Solution:
    """Decision variables: antenna positions, power factors, combiner.

    positions is (N, 2) float, powers is (K,) complex, combiner is (N,)
    complex. Any array-likes are accepted and normalized.
    """

    positions: np.ndarray
    powers: np.ndarray
    combiner: np.ndarray

    def __post_init__(self):
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.powers = np.asarray(self.powers, dtype=complex)
        self.combiner = np.asarray(self.combiner, dtype=complex)
        if self.positions.ndim != 2 or self.positions.shape[1] != 2:
            raise ValueError("positions must have shape (N, 2)")

    def copy(self) -> "Solution":
        return Solution(self.positions.copy(), self.powers.copy(),
                        self.combiner.copy())


@dataclass
class PositionCoeffs:
    """Surrogate coefficients for one antenna: c (K,) complex, d (K,) >= 0."""

    c: np.ndarray
    d: np.ndarray


def _check_dims(scenario: Scenario, sol: Solution):
    k, n = scenario.num_sensors, scenario.num_antennas
    if sol.positions.shape != (n, 2):
        raise ValueError(f"positions shape {sol.positions.shape}, expected ({n}, 2)")
    if sol.powers.shape != (k,):
        raise ValueError(f"powers shape {sol.powers.shape}, expected ({k},)")
    if sol.combiner.shape != (n,):
        raise ValueError(f"combiner shape {sol.combiner.shape}, expected ({n},)")


def _mse_from_matrix(h_mat: np.ndarray, u: np.ndarray, w: np.ndarray,
                     noise_power: float) -> float:
    misalign = (h_mat @ np.conj(u)) * w - 1.0
    noise = noise_power * float(np.vdot(u, u).real)
    return float(np.sum(misalign.real ** 2 + misalign.imag ** 2) + noise)


def compute_mse(scenario: Scenario, sol: Solution) -> float:
    """Computation MSE of the solution, channels evaluated at sol.positions."""
    _check_dims(scenario, sol)
    h_mat = channel_matrix(scenario, sol.positions)
    return _mse_from_matrix(h_mat, sol.combiner, sol.powers, scenario.noise_power)


def _coeffs_from_matrix(h_mat: np.ndarray, u: np.ndarray, w: np.ndarray,
                        n: int) -> PositionCoeffs:
    # sum over n' != n of conj(u_n') h_k(r_n'), per sensor
    partial = h_mat @ np.conj(u) - np.conj(u[n]) * h_mat[:, n]
    c = u[n] * np.conj(w) - np.abs(w) ** 2 * u[n] * partial
    d = np.abs(w * u[n]) ** 2
    return PositionCoeffs(c=c, d=d)


def position_coeffs(scenario: Scenario, sol: Solution, n: int) -> PositionCoeffs:
    """Surrogate coefficients for antenna n (0-based index).

    c_kn = u_n conj(w_k) - |w_k|^2 u_n sum_{n' != n} conj(u_n') h_k(r_n')
    d_kn = |w_k u_n|^2
    """
    _check_dims(scenario, sol)
    if not 0 <= n < scenario.num_antennas:
        raise ValueError(f"antenna index {n} out of range")
    h_mat = channel_matrix(scenario, sol.positions)
    return _coeffs_from_matrix(h_mat, sol.combiner, sol.powers, n)


class _Evaluator:
    """Hot-path channel and surrogate evaluation bound to one scenario.

    Holds the concatenated path arrays in the layout the compiled kernels
    expect: real/imaginary splits of the composite amplitudes and a
    bounds array so sensor k owns flat entries bounds[k]:bounds[k+1].
    """

    __slots__ = ("rho_x", "rho_y", "amp", "amp_re", "amp_im", "bounds",
                 "offsets", "tpl", "k")

    def __init__(self, scenario: Scenario):
        rho_all, amp_all, offsets = scenario.path_stack()
        self.rho_x = np.ascontiguousarray(rho_all[:, 0])
        self.rho_y = np.ascontiguousarray(rho_all[:, 1])
        self.amp = amp_all
        self.amp_re = np.ascontiguousarray(amp_all.real)
        self.amp_im = np.ascontiguousarray(amp_all.imag)
        self.offsets = offsets
        self.bounds = np.append(offsets, len(amp_all)).astype(np.int64)
        self.k = scenario.num_sensors
        self.tpl = 2.0 * np.pi / scenario.wavelength

    def gains(self, rx: float, ry: float) -> np.ndarray:
        """All sensors' channel gains at (rx, ry), shape (K,)."""
        phase = self.rho_x * rx
        phase += self.rho_y * ry
        phase *= -self.tpl
        return np.add.reduceat(self.amp * np.exp(1j * phase), self.offsets)

    def matrix(self, positions: np.ndarray) -> np.ndarray:
        """Channel matrix (K, N) built column-by-column via gains()."""
        cols = [self.gains(float(x), float(y)) for x, y in positions]
        return np.stack(cols, axis=1)

    def kernel_coeffs(self, coeffs: PositionCoeffs):
        """Coefficient arrays in the dtype/layout the kernels expect."""
        c = np.asarray(coeffs.c, dtype=complex)
        return (np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag),
                np.ascontiguousarray(np.asarray(coeffs.d, dtype=float)))

    def surrogate(self, coeffs: PositionCoeffs, rx: float, ry: float) -> float:
        c_re, c_im, d = self.kernel_coeffs(coeffs)
        return float(_kernels.surrogate_value(
            self.rho_x, self.rho_y, self.amp_re, self.amp_im, self.bounds,
            c_re, c_im, d, self.tpl, rx, ry))

    def surrogate_grad(self, coeffs: PositionCoeffs, rx: float, ry: float):
        c_re, c_im, d = self.kernel_coeffs(coeffs)
        gx, gy = _kernels.surrogate_gradient(
            self.rho_x, self.rho_y, self.amp_re, self.amp_im, self.bounds,
            c_re, c_im, d, self.tpl, rx, ry)
        return float(gx), float(gy)


def _evaluator(scenario: Scenario) -> _Evaluator:
    """Per-scenario cached evaluator instance."""
    ev = getattr(scenario, "_evaluator_cache", None)
    if ev is None:
        ev = _Evaluator(scenario)
        scenario._evaluator_cache = ev
    return ev


def f_n(scenario: Scenario, sol: Solution, n: int, r,
        coeffs: PositionCoeffs | None = None) -> float:
    """Surrogate objective for antenna n evaluated at candidate position r.

    Other antennas stay at sol.positions; pass precomputed ``coeffs`` when
    evaluating many candidates against the same solution.
    """
    if coeffs is None:
        coeffs = position_coeffs(scenario, sol, n)
    r = np.asarray(r, dtype=float)
    return _evaluator(scenario).surrogate(coeffs, float(r[0]), float(r[1]))


def grad_f_n(scenario: Scenario, sol: Solution, n: int, r,
             coeffs: PositionCoeffs | None = None) -> np.ndarray:
    """Gradient of f_n with respect to the candidate position, shape (2,)."""
    if coeffs is None:
        coeffs = position_coeffs(scenario, sol, n)
    r = np.asarray(r, dtype=float)
    gx, gy = _evaluator(scenario).surrogate_grad(coeffs, float(r[0]), float(r[1]))
    return np.array([gx, gy])
