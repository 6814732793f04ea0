"""Embedded adaptive Runge-Kutta integration for linear quantum dynamics.

Dormand-Prince 5(4) pair with a PI step-size controller.  The state may
be real or complex; the right-hand side is any callable f(t, y).  Dense
output between accepted steps uses cubic Hermite interpolation, which
is plenty for trajectory sampling at the tolerances used here.
"""
from __future__ import annotations

import numpy as np


class StepSizeUnderflow(RuntimeError):
    """Raised when the controller cannot meet the tolerance: the step
    size collapsed below the resolution of the time variable."""


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176,
              -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784,
                11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ORDER = 5.0
# PI controller exponents (Gustafsson-style)
_ALPHA = 0.7 / _ORDER
_BETA = 0.4 / _ORDER
_EPS = float(np.finfo(float).eps)


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    q = np.abs(err)
    q /= scale
    return float(np.sqrt(q.dot(q) / q.size))


def _initial_step(f, t0, y0, f0, rtol, atol, t_end):
    """Conventional starter estimate, clipped to the interval."""
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((np.abs(y0) / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((np.abs(f0) / scale) ** 2)))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * f0
    f1 = f(t0 + h0, y1)
    d2 = float(np.sqrt(np.mean((np.abs(f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)
    return min(100 * h0, h1, t_end - t0)


class DenseSolution:
    """Piecewise cubic Hermite interpolant over the accepted steps."""

    def __init__(self, ts, ys, fs):
        self.ts = np.asarray(ts)
        self.ys = ys
        self.fs = fs

    @property
    def t_end(self):
        return self.ts[-1]

    @property
    def y_end(self):
        return self.ys[-1]

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = np.clip(np.searchsorted(self.ts, t, side="right") - 1,
                      0, len(self.ts) - 2)
        out = np.empty((t.size,) + self.ys[0].shape, dtype=self.ys[0].dtype)
        for k, (ti, i) in enumerate(zip(t, idx)):
            t0, t1 = self.ts[i], self.ts[i + 1]
            h = t1 - t0
            if h == 0.0:
                out[k] = self.ys[i]
                continue
            s = (ti - t0) / h
            h00 = (1 + 2 * s) * (1 - s) ** 2
            h10 = s * (1 - s) ** 2
            h01 = s * s * (3 - 2 * s)
            h11 = s * s * (s - 1)
            out[k] = (h00 * self.ys[i] + h * h10 * self.fs[i]
                      + h01 * self.ys[i + 1] + h * h11 * self.fs[i + 1])
        return out


def integrate_ode(f, t_span, y0, rtol=1e-9, atol=1e-12, max_step=np.inf,
                  dense=False):
    """Integrate y' = f(t, y) over t_span with the DP5(4) pair.

    Returns the terminal state, or a :class:`DenseSolution` when
    ``dense`` is set.  Raises :class:`StepSizeUnderflow` when the
    controller cannot meet the tolerance.
    """
    t0, t_end = float(t_span[0]), float(t_span[1])
    y = np.array(y0, copy=True)
    if t_end == t0:
        if dense:
            f0 = f(t0, y)
            return DenseSolution([t0, t0], [y, y.copy()], [f0, f0])
        return y

    t = t0
    k = np.empty((7, y.size), dtype=y.dtype)
    k[0] = f(t, y)
    h = min(_initial_step(f, t0, y, k[0], rtol, atol, t_end), max_step)
    err_prev = 1.0
    time_scale = max(abs(t0), abs(t_end))

    ts, ys, fs = [t0], [y.copy()], [k[0].copy()]
    while t < t_end:
        if t_end - t <= 4 * _EPS * time_scale:
            break                      # end reached within time resolution
        if h <= 16 * _EPS * time_scale:
            raise StepSizeUnderflow(
                f"step size underflow at t={t:.6g} (h={h:.3g})")
        h_step = min(h, t_end - t)
        for i in range(1, 7):
            yi = y + h_step * (_A[i] @ k[:i])
            k[i] = f(t + _C[i] * h_step, yi)
        y_new = y + h_step * (_B5 @ k)
        err_vec = h_step * (_E @ k)
        err = _error_norm(err_vec, y, y_new, rtol, atol)

        if err <= 1.0:
            t = t + h_step
            if t_end - t <= 4 * _EPS * time_scale:
                t = t_end
            y = y_new
            k[0] = k[6]  # FSAL
            if dense:
                ts.append(t)
                ys.append(y.copy())
                fs.append(k[0].copy())
            factor = _SAFETY * (err + 1e-16) ** (-_ALPHA) \
                * err_prev ** _BETA
            err_prev = max(err, 1e-16)
        else:
            factor = _SAFETY * err ** (-_ALPHA)
        h = min(h_step * min(_MAX_FACTOR, max(_MIN_FACTOR, factor)),
                max_step)

    if dense:
        return DenseSolution(ts, ys, fs)
    return y
