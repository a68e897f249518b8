"""Compiled hot-path kernels for surrogate evaluation and position ascent.

All math is written out in real arithmetic over the concatenated path
arrays (sensor k owns entries bounds[k]:bounds[k+1]). fastmath stays off
so results are IEEE-reproducible run to run.
"""

import math

import numba as nb
import numpy as np


@nb.njit(cache=True, fastmath=False)
def surrogate_value(rho_x, rho_y, amp_re, amp_im, bounds,
                    c_re, c_im, d, tpl, rx, ry):
    """f(r) = sum_k 2 Re{conj(h_k) c_k} - d_k |h_k|^2 at point (rx, ry)."""
    total = 0.0
    for k in range(bounds.shape[0] - 1):
        h_re = 0.0
        h_im = 0.0
        for i in range(bounds[k], bounds[k + 1]):
            ph = -tpl * (rho_x[i] * rx + rho_y[i] * ry)
            tc = math.cos(ph)
            ts = math.sin(ph)
            h_re += amp_re[i] * tc - amp_im[i] * ts
            h_im += amp_re[i] * ts + amp_im[i] * tc
        total += 2.0 * (h_re * c_re[k] + h_im * c_im[k]) \
            - d[k] * (h_re * h_re + h_im * h_im)
    return total


@nb.njit(cache=True, fastmath=False)
def surrogate_gradient(rho_x, rho_y, amp_re, amp_im, bounds,
                       c_re, c_im, d, tpl, rx, ry):
    """Gradient of the surrogate at (rx, ry).

    With S = sum_l term_l * rho_l per sensor, dh/dr = -j*tpl*S and
    df/dr = -2*tpl*(Im{c conj(S)} + d Im{conj(h) S}) per component.
    """
    gx = 0.0
    gy = 0.0
    for k in range(bounds.shape[0] - 1):
        h_re = 0.0
        h_im = 0.0
        sx_re = 0.0
        sx_im = 0.0
        sy_re = 0.0
        sy_im = 0.0
        for i in range(bounds[k], bounds[k + 1]):
            ph = -tpl * (rho_x[i] * rx + rho_y[i] * ry)
            tc = math.cos(ph)
            ts = math.sin(ph)
            t_re = amp_re[i] * tc - amp_im[i] * ts
            t_im = amp_re[i] * ts + amp_im[i] * tc
            h_re += t_re
            h_im += t_im
            sx_re += t_re * rho_x[i]
            sx_im += t_im * rho_x[i]
            sy_re += t_re * rho_y[i]
            sy_im += t_im * rho_y[i]
        gx += (c_im[k] * sx_re - c_re[k] * sx_im) \
            + d[k] * (h_re * sx_im - h_im * sx_re)
        gy += (c_im[k] * sy_re - c_re[k] * sy_im) \
            + d[k] * (h_re * sy_im - h_im * sy_re)
    return -2.0 * tpl * gx, -2.0 * tpl * gy


@nb.njit(cache=True, fastmath=False)
def ascend_position(rho_x, rho_y, amp_re, amp_im, bounds, c_re, c_im, d,
                    tpl, rx, ry, ox, oy, region, dmin2, init_step,
                    start_step, min_step, shrink, armijo_c, grad_tol,
                    max_iters):
    """Projected gradient ascent with Armijo backtracking for one antenna.

    Candidates are clipped to the [0, region]^2 box; candidates within
    sqrt(dmin2) of another antenna count as failed steps. Returns
    (x, y, last accepted step or -1.0). The surrogate value at the
    returned point is never below the starting value.
    """
    f_cur = surrogate_value(rho_x, rho_y, amp_re, amp_im, bounds,
                            c_re, c_im, d, tpl, rx, ry)
    step = start_step if start_step < init_step else init_step
    if step < min_step:
        step = min_step
    last_accepted = -1.0
    for _ in range(max_iters):
        gx, gy = surrogate_gradient(rho_x, rho_y, amp_re, amp_im, bounds,
                                    c_re, c_im, d, tpl, rx, ry)
        if math.sqrt(gx * gx + gy * gy) < grad_tol:
            break
        s = step
        accepted = False
        cx = rx
        cy = ry
        f_new = f_cur
        while s >= min_step:
            cx = rx + s * gx
            cy = ry + s * gy
            if cx < 0.0:
                cx = 0.0
            elif cx > region:
                cx = region
            if cy < 0.0:
                cy = 0.0
            elif cy > region:
                cy = region
            ascent = gx * (cx - rx) + gy * (cy - ry)
            if ascent <= 0.0:
                break  # box-blocked: no feasible ascent along g
            ok = True
            for j in range(ox.shape[0]):
                dx = ox[j] - cx
                dy = oy[j] - cy
                if dx * dx + dy * dy < dmin2:
                    ok = False
                    break
            if ok:
                f_new = surrogate_value(rho_x, rho_y, amp_re, amp_im, bounds,
                                        c_re, c_im, d, tpl, cx, cy)
                if f_new >= f_cur + armijo_c * ascent:
                    accepted = True
                    break
            s *= shrink
        if not accepted:
            break
        rx = cx
        ry = cy
        f_cur = f_new
        last_accepted = s
        step = s / shrink
        if step > init_step:
            step = init_step
    return rx, ry, last_accepted
