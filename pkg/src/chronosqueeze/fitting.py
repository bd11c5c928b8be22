"""Strength calibration: exponential growth law and degree of squeezing.

At a delay where the driving envelope crosses zero the simplified variance
ratio is exactly ``exp(-2 * polarity * strength)``, and the detected trace
inherits that exponential dependence.  Sweeping the strength at fixed
delay therefore follows

    h(r) = a1 * (exp(sign * a2 * r) - 1)

with ``sign = -1`` on the squeezing branch and ``+1`` on the
anti-squeezing branch.  The fitted amplitude ``a1`` is the saturation
scale of the detected squeezing, and ``-rdv / a1`` is the degree of
squeezing: +1 means the detected noise reduction has saturated, negative
values are anti-squeezing.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .conformal import ConformalMap, CrystalConfig, build_conformal_map
from .detection import ProbeKernel, rdv_trace
from .errors import FitError, UnsupportedShapeError
from .pulses import DrivingPulse, PulseShape

__all__ = [
    "FitBranch",
    "FitResult",
    "default_strength_grid",
    "extrema_vs_r",
    "fit_exponential",
    "degree_from_fit",
]

_GRADIENT_TOL = 1e-12
_MAX_ITERATIONS = 200


class FitBranch(enum.Enum):
    SQUEEZING = "squeezing"        # rdv <= 0, h(r) = a1 (exp(-a2 r) - 1)
    ANTI_SQUEEZING = "anti_squeezing"  # rdv >= 0, h(r) = a1 (exp(+a2 r) - 1)

    @property
    def sign(self) -> int:
        return -1 if self is FitBranch.SQUEEZING else 1


@dataclass(frozen=True)
class FitResult:
    a1: float
    a2: float
    residual_rms: float
    branch: FitBranch

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        out = self.a1 * np.expm1(self.branch.sign * self.a2 * r)
        return float(out) if out.ndim == 0 else out

    def as_dict(self) -> dict:
        return {
            "A1": self.a1,
            "A2": self.a2,
            "residual_rms": self.residual_rms,
            "branch": self.branch.value,
        }


def default_strength_grid() -> np.ndarray:
    """Canonical sweep for calibration fits: 16 points on [0.05, 2]."""
    return np.linspace(0.05, 2.0, 16)


def extrema_vs_r(
    shape: PulseShape,
    crystal: CrystalConfig,
    probe: ProbeKernel,
    r_values,
    polarity: int = 1,
    delay: float = 0.0,
    map_cache: dict | None = None,
    omega_points: int = 4096,
    **build_kwargs,
) -> np.ndarray:
    """Detected rdv at a fixed delay, swept over the strength.

    ``delay`` defaults to zero: for the odd single-cycle envelope that is
    the zero crossing where the exponential law is exact in the
    instantaneous picture.  ``map_cache`` (any mutable mapping) lets
    callers reuse the expensive exit maps across different probes; maps
    depend on the pulse alone, not on the probe.
    """
    if shape is PulseShape.SAMPLED:
        raise UnsupportedShapeError("strength sweeps need a parametric shape")
    rs = np.asarray(r_values, dtype=float)
    if rs.ndim != 1 or rs.size == 0:
        raise ValueError("r_values must be a nonempty 1-d array")
    if np.any(rs < 0) or np.any(np.diff(rs) <= 0):
        raise ValueError("r_values must be nonnegative and strictly ascending")

    out = np.empty(rs.size)
    delays = np.array([float(delay)])
    for i, r in enumerate(rs):
        cmap = _cached_map(shape, float(r), polarity, crystal, map_cache, build_kwargs)
        trace = rdv_trace(cmap, probe, delays, omega_points=omega_points)
        out[i] = trace.rdv[0]
    return out


def _cached_map(shape, r, polarity, crystal, cache, build_kwargs) -> ConformalMap:
    key = (shape.value, r, polarity)
    if cache is not None and key in cache:
        return cache[key]
    pulse = DrivingPulse(shape, r, polarity)
    cmap = build_conformal_map(pulse, crystal, **build_kwargs)
    if cache is not None:
        cache[key] = cmap
    return cmap


def fit_exponential(r_values, rdv_values, branch: FitBranch) -> FitResult:
    """Least-squares fit of ``a1 * (exp(sign * a2 * r) - 1)``.

    Damped Gauss-Newton on the log-transformed parameters (both are
    positive by construction).  Converges when the gradient max-norm
    drops below 1e-12; more than 200 iterations raise :class:`FitError`,
    as do degenerate or wrong-branch data.
    """
    rs = np.asarray(r_values, dtype=float)
    vals = np.asarray(rdv_values, dtype=float)
    if rs.shape != vals.shape or rs.ndim != 1 or rs.size < 3:
        raise FitError("need at least 3 matching (r, rdv) samples")
    if np.any(rs <= 0) or np.any(np.diff(rs) <= 0):
        raise FitError("r values must be positive and strictly ascending")
    sign = branch.sign
    magnitudes = np.abs(vals)
    if np.max(magnitudes) < 1e-300:
        raise FitError("all rdv values vanish; nothing to fit")
    if np.any(sign * vals < 0):
        raise FitError(
            f"data signs contradict the {branch.value} branch; fit the other one")

    # initialization: growth rate from the endpoint log-ratio, amplitude
    # from the first point
    v0, v1 = magnitudes[0], magnitudes[-1]
    if v0 > 0 and v1 > 0 and rs[-1] > rs[0]:
        a2 = abs(math.log(v1 / v0)) / (rs[-1] - rs[0])
    else:
        a2 = 1.0
    a2 = min(max(a2, 1e-3), 1e2)
    a1 = max(v0 / abs(math.expm1(sign * a2 * rs[0])), 1e-300)

    p = np.array([math.log(a1), math.log(a2)])
    lam = 1e-3

    def model_and_jacobian(p):
        a1, a2 = math.exp(p[0]), math.exp(p[1])
        growth = np.exp(sign * a2 * rs)
        model = a1 * (growth - 1.0)
        jac = np.column_stack([model, a1 * sign * a2 * rs * growth])
        return model, jac

    model, jac = model_and_jacobian(p)
    residual = model - vals
    cost = float(residual @ residual)

    for _ in range(_MAX_ITERATIONS):
        gradient = jac.T @ residual
        if np.max(np.abs(gradient)) < _GRADIENT_TOL:
            break
        hess = jac.T @ jac
        step = None
        for _ in range(60):
            try:
                step = np.linalg.solve(hess + lam * np.diag(np.diag(hess)), -gradient)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + step
            t_model, t_jac = model_and_jacobian(trial)
            t_res = t_model - vals
            t_cost = float(t_res @ t_res)
            if t_cost <= cost or not math.isfinite(t_cost):
                if math.isfinite(t_cost):
                    p, model, jac, residual, cost = trial, t_model, t_jac, t_res, t_cost
                    lam = max(lam / 3.0, 1e-14)
                    break
            lam *= 10.0
            if lam > 1e14:
                break
        else:
            raise FitError("damping runaway: no acceptable step found")
        if step is not None and np.max(np.abs(step)) < 1e-15:
            break
    else:
        raise FitError(f"no convergence within {_MAX_ITERATIONS} iterations")

    a1, a2 = math.exp(p[0]), math.exp(p[1])
    rms = math.sqrt(cost / rs.size)
    return FitResult(a1=a1, a2=a2, residual_rms=rms, branch=branch)


def degree_from_fit(rdv_value, fit: FitResult):
    """Degree of squeezing, ``-rdv / a1`` (fraction; +1 = saturated).

    Positive for squeezing (rdv < 0), negative for anti-squeezing, and in
    particular ``degree_from_fit(fit.evaluate(r), fit)`` on the squeezing
    branch is ``1 - exp(-a2 r)``.
    """
    if fit.a1 <= 0:
        raise ValueError("fit amplitude must be positive")
    out = -np.asarray(rdv_value, dtype=float) / fit.a1
    return float(out) if out.ndim == 0 else out
