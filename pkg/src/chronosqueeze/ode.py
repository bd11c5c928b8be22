"""Adaptive embedded Runge-Kutta integration for characteristic bundles.

A plain Dormand-Prince 5(4) pair acting on float64 vectors.  Every
component is an independent copy of the same autonomous scalar ODE, so the
right-hand side is evaluated once per stage on the whole bundle and the
step controller keeps the worst component inside tolerance (max norm, not
RMS: the exit-map equivalence target is a sup-norm bound).
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import IntegrationError

__all__ = ["integrate_adaptive"]

# Dormand-Prince 5(4) tableau (FSAL: stage 7 doubles as stage 1 of the
# next step).  b5 propagates, b5 - b4 is the embedded error weight.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_ERR = _B5 - np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_MAX_STEPS = 1_000_000


def integrate_adaptive(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    z0: float,
    z1: float,
    rtol: float = 1e-11,
    atol: float = 1e-12,
    record: bool = False,
) -> np.ndarray | tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate ``dy/dz = rhs(z, y)`` from z0 to z1 (either direction).

    Parameters
    ----------
    rhs : callable
        Vectorized right-hand side.
    y0 : ndarray
        Initial bundle state.
    rtol, atol : float
        Per-component error control: a step is accepted when
        ``max |err_i| / (atol + rtol |y_i|) <= 1``.
    record : bool
        When true, also return the accepted-step history as
        ``(y_final, z_path, y_path)`` with y_path of shape (n_steps+1, n).

    Raises
    ------
    IntegrationError
        On step-size underflow or when the step budget is exhausted.
    """
    y = np.array(y0, dtype=float, copy=True)
    span = z1 - z0
    if span == 0.0:
        if record:
            return y, np.array([z0]), y[None, :].copy()
        return y
    direction = 1.0 if span > 0 else -1.0

    z = z0
    k = np.empty((7,) + y.shape)
    k[0] = rhs(z, y)

    # initial step from the classic curvature-free heuristic
    scale = atol + rtol * np.abs(y)
    d0 = np.max(np.abs(y) / scale)
    d1 = np.max(np.abs(k[0]) / scale)
    h = 0.01 * d0 / d1 if d1 > 1e-10 else 0.1 * abs(span)
    h = direction * min(max(h, 1e-8 * abs(span)), abs(span))

    z_path = [z]
    y_path = [y.copy()] if record else None
    min_step = 1e-14 * max(abs(span), 1.0)

    for _ in range(_MAX_STEPS):
        if abs(h) < min_step:
            raise IntegrationError(
                f"step size underflow at z={z:g} (|h|={abs(h):g})")
        if (z + h - z1) * direction > 0:
            h = z1 - z

        for i in range(1, 7):
            yi = y + h * (k[:i].T @ _A[i])
            k[i] = rhs(z + _C[i] * h, yi)

        y_new = y + h * (k.T @ _B5)
        err = h * (k.T @ _ERR)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = np.max(np.abs(err) / scale)

        if err_norm <= 1.0:
            z += h
            y = y_new
            k[0] = k[6]  # FSAL
            if record:
                z_path.append(z)
                y_path.append(y.copy())
            if z == z1 or (z - z1) * direction >= 0:
                break
            factor = _MAX_FACTOR if err_norm == 0.0 else min(
                _MAX_FACTOR, _SAFETY * err_norm ** -0.2)
            h *= factor
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)
    else:
        raise IntegrationError(f"step budget exhausted ({_MAX_STEPS} steps)")

    if record:
        return y, np.asarray(z_path), np.asarray(y_path)
    return y
