"""Conformal exit-time map of a driven thin crystal.

A strong coherent pulse co-propagating with the quantum field modulates the
local light speed.  Along each characteristic ray the quantum field is
transported unchanged, so the crystal acts as a time remap: the field
leaving the crystal at retarded time ``theta`` is the input field read off
at the conformal time ``tau_out(theta)``, amplified by the local flow rate
``d tau_out / d theta`` (the map slope).  Everything here is dimensionless:
times in units of 1/gamma0, propagation depth as the fraction ``z_frac``
of the crystal length.

The characteristic equation in the comoving frame is

    d theta / d z_frac = -polarity * strength * e(theta)

with ``e`` the unit envelope from :mod:`chronosqueeze.pulses`.  For the
plain sech envelope the flow integrates in closed form,

    tau_out(theta) = asinh( sinh(theta) + polarity * strength * z_frac ),

which doubles as the reference oracle for the general integrator.  For all
other envelopes the exit map is built by running the flow backwards from
the exit grid, so no numerical inversion of a forward solution is needed;
the slope rides along as the variational (tangent) component of the same
integration.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq, minimize_scalar

from .errors import (
    CausalityError,
    InvalidRegimeError,
    UnsupportedShapeError,
    WindowError,
)
from .ode import integrate_adaptive
from .pulses import DrivingPulse, PulseShape, eval_pulse

__all__ = [
    "CrystalConfig",
    "ConformalMap",
    "ValidityReport",
    "sech_conformal_closed",
    "integrate_characteristic",
    "CharacteristicPath",
    "build_conformal_map",
    "invert_map",
    "worldline_bundle",
    "causality_g",
    "svaa_rmax",
    "causality_budget",
    "check_validity",
]

SPEED_OF_LIGHT = 299792458.0

DEFAULT_GRID_SPAN = 60.0
DEFAULT_GRID_POINTS = 2**14 + 1
DEFAULT_RTOL = 1e-11
DEFAULT_ATOL = 1e-12

# fraction of the envelope-approximation bound beyond which we warn
_SVAA_WARN_FRACTION = 0.5


@dataclass(frozen=True)
class CrystalConfig:
    """Host crystal parameters.

    Attributes
    ----------
    n : float
        Refractive index (dispersionless model).
    length : float
        Crystal thickness in meters.
    gamma0 : float
        Inverse driving-pulse duration as an angular rate (rad/s).  This is
        the unit that makes times dimensionless throughout the package.
    c0 : float
        Vacuum speed of light (m/s); overridable for unit experiments.
    """

    n: float
    length: float
    gamma0: float
    c0: float = SPEED_OF_LIGHT

    def __post_init__(self) -> None:
        if self.n <= 1.0:
            raise ValueError(f"refractive index must exceed 1, got {self.n}")
        if self.length <= 0 or self.gamma0 <= 0 or self.c0 <= 0:
            raise ValueError("length, gamma0 and c0 must be positive")

    @classmethod
    def from_practical(cls, n: float, length_um: float, gamma0_thz: float,
                       c0: float = SPEED_OF_LIGHT) -> "CrystalConfig":
        """Build from bench units: micrometers and THz (gamma0 / 2 pi)."""
        return cls(n=n, length=length_um * 1e-6,
                   gamma0=2.0 * math.pi * gamma0_thz * 1e12, c0=c0)


def svaa_rmax(crystal: CrystalConfig) -> float:
    """Strength bound of the slowly-varying-amplitude treatment.

    The driving pulse is treated as rigid while it reshapes the quantum
    field; that bookkeeping holds for strengths well below
    ``n * gamma0 * length / c0``.
    """
    return crystal.n * crystal.gamma0 * crystal.length / crystal.c0


def causality_budget(crystal: CrystalConfig) -> float:
    """Largest admissible conformal-time advance, ``(n-1) gamma0 l / c0``.

    The remap may pull the exit field forward in retarded time at most by
    the walk-off between the front velocity and the group delay.
    """
    return (crystal.n - 1.0) * crystal.gamma0 * crystal.length / crystal.c0


def sech_conformal_closed(theta, strength: float, polarity: int = 1,
                          z_frac: float = 1.0):
    """Closed-form conformal time for the sech envelope.

    ``asinh(sinh(theta) + polarity * strength * z_frac)``: the conformal
    time at depth ``z_frac`` corresponding to local retarded time
    ``theta``.  Serves as the exact reference for the general integrator.
    """
    if not 0.0 <= z_frac <= 1.0:
        raise ValueError(f"z_frac must lie in [0, 1], got {z_frac}")
    if strength < 0:
        raise ValueError("strength must be >= 0")
    th = np.asarray(theta, dtype=float)
    out = np.arcsinh(np.sinh(th) + polarity * strength * z_frac)
    return float(out) if out.ndim == 0 else out


def _sech_closed_slope(theta, strength: float, polarity: int,
                       z_frac: float = 1.0):
    th = np.asarray(theta, dtype=float)
    tau = np.arcsinh(np.sinh(th) + polarity * strength * z_frac)
    return np.cosh(th) / np.cosh(tau)


def _envelope_derivative(pulse: DrivingPulse, theta: np.ndarray) -> np.ndarray:
    """d e / d theta for the variational slope equation."""
    th = np.asarray(theta, dtype=float)
    if pulse.shape is PulseShape.HALF_CYCLE_SECH:
        return -np.tanh(th) / np.cosh(th)
    if pulse.shape is PulseShape.REALISTIC_HALF_CYCLE:
        return -np.tanh(th) / np.cosh(th) + 0.01 * np.tanh(th / 10) / np.cosh(th / 10)
    if pulse.shape is PulseShape.SINGLE_CYCLE:
        out = np.empty_like(th)
        small = np.abs(th) < 1e-2
        ts = th[small]
        out[small] = -1.0 + 1.5 * ts**2 - (5.0 / 6.0) * ts**4
        tl = th[~small]
        # [1 - (1 + 2 th^2) exp(-th^2)] / th^2, cancels as th^2 near zero
        out[~small] = (1.0 - (1.0 + 2.0 * tl**2) * np.exp(-tl**2)) / tl**2
        return out
    # sampled: the shape-preserving interpolant's derivative is the best we have
    return pulse._interp.derivative()(th)


@dataclass
class ConformalMap:
    """Tabulated exit map of a crystal pass.

    Attributes
    ----------
    theta_grid : ndarray
        Exit retarded times (dimensionless, strictly increasing).
    tau_out : ndarray
        Conformal times ``tau_out(theta_grid)``; strictly increasing.
    slope : ndarray
        ``d tau_out / d theta`` on the same grid; strictly positive.
    pulse, crystal
        The configuration the map was built from.
    closed_form : bool
        True when the sech closed form supplied exact values (then the
        evaluation methods below are analytic, not interpolated).
    """

    theta_grid: np.ndarray
    tau_out: np.ndarray
    slope: np.ndarray
    pulse: DrivingPulse
    crystal: CrystalConfig
    closed_form: bool = False
    _tau_ip: PchipInterpolator | None = field(default=None, repr=False)
    _inv_ip: PchipInterpolator | None = field(default=None, repr=False)
    _slope_ip: PchipInterpolator | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        d_tau = np.diff(self.tau_out)
        if np.any(d_tau <= 0):
            bad = int(np.argmax(d_tau <= 0))
            raise InvalidRegimeError(
                f"exit times not strictly monotone near theta="
                f"{self.theta_grid[bad]:.6g}; the flow admits no inverse there")
        if np.any(self.slope <= 0):
            raise InvalidRegimeError("map slope must stay positive")
        if not self.closed_form:
            self._tau_ip = PchipInterpolator(self.theta_grid, self.tau_out)
            self._inv_ip = PchipInterpolator(self.tau_out, self.theta_grid)
            self._slope_ip = PchipInterpolator(self.theta_grid, self.slope)

    # -- evaluation --------------------------------------------------------

    def _check_theta(self, th: np.ndarray) -> None:
        lo, hi = self.theta_grid[0], self.theta_grid[-1]
        if th.min() < lo or th.max() > hi:
            raise WindowError(
                f"theta in [{th.min():.6g}, {th.max():.6g}] outside the "
                f"tabulated span [{lo:g}, {hi:g}]; rebuild with a wider grid")

    def tau(self, theta):
        """Conformal time at exit retarded time(s) ``theta``."""
        th = np.asarray(theta, dtype=float)
        if self.closed_form:
            out = sech_conformal_closed(th, self.pulse.strength, self.pulse.polarity)
        else:
            self._check_theta(np.atleast_1d(th))
            out = self._tau_ip(th)
        return float(out) if np.ndim(out) == 0 else out

    def inverse(self, tau_values):
        """Exit retarded time(s) whose conformal time is ``tau_values``."""
        tv = np.asarray(tau_values, dtype=float)
        if self.closed_form:
            r, s = self.pulse.strength, self.pulse.polarity
            out = np.arcsinh(np.sinh(tv) - s * r)
        else:
            lo, hi = self.tau_out[0], self.tau_out[-1]
            flat = np.atleast_1d(tv)
            if flat.min() < lo or flat.max() > hi:
                raise WindowError(
                    f"conformal time outside tabulated range [{lo:.6g}, {hi:.6g}]; "
                    "rebuild with a wider grid")
            out = self._inv_ip(tv)
        return float(out) if np.ndim(out) == 0 else out

    def slope_at(self, theta):
        """Map slope ``d tau_out / d theta`` at exit time(s) ``theta``."""
        th = np.asarray(theta, dtype=float)
        if self.closed_form:
            out = _sech_closed_slope(th, self.pulse.strength, self.pulse.polarity)
        else:
            self._check_theta(np.atleast_1d(th))
            out = self._slope_ip(th)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def min_slope(self) -> float:
        return float(self.slope.min())

    @property
    def advance(self) -> np.ndarray:
        """Conformal-time advance ``tau_out - theta`` on the grid."""
        return self.tau_out - self.theta_grid


def _symmetric_grid(span: float, points: int) -> np.ndarray:
    """Uniform grid on [-span, span], bitwise symmetric when points is odd."""
    if points < 9:
        raise ValueError("grid needs at least 9 points")
    if points % 2:
        half = np.linspace(0.0, span, (points + 1) // 2)
        return np.concatenate([-half[:0:-1], half])
    return np.linspace(-span, span, points)


def build_conformal_map(
    pulse: DrivingPulse,
    crystal: CrystalConfig,
    span: float = DEFAULT_GRID_SPAN,
    points: int = DEFAULT_GRID_POINTS,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    method: str = "auto",
) -> ConformalMap:
    """Tabulate the exit map on a canonical retarded-time grid.

    Parameters
    ----------
    span, points : float, int
        The grid is uniform on [-span, span].  An odd point count makes it
        exactly symmetric, which keeps odd envelopes odd to machine
        precision.
    rtol, atol : float
        Characteristic-flow error control, per unit depth.
    method : {"auto", "closed", "ode"}
        "auto" uses the closed form for the sech envelope and the flow
        integrator otherwise; the explicit values force one path (the
        forced "ode" path on a sech pulse is the standard cross-check).

    Notes
    -----
    ``tau_out`` is obtained by integrating the characteristic flow
    backwards from each grid point, so values land exactly on the grid.
    The slope is integrated jointly as the tangent of the flow rather than
    differenced afterwards, which keeps it at integrator accuracy.  Both
    are then validated: exit times must be strictly monotone and the slope
    strictly positive.  Envelopes with slow tails (the single-cycle shape
    decays only as 1/theta) never vanish at the grid ends; the map simply
    keeps its small residual drift there.
    """
    if method not in ("auto", "closed", "ode"):
        raise ValueError(f"unknown method {method!r}")
    if method == "closed" and pulse.shape is not PulseShape.HALF_CYCLE_SECH:
        raise UnsupportedShapeError("closed form exists only for the sech envelope")

    grid = _symmetric_grid(span, points)
    use_closed = (method == "closed") or (
        method == "auto" and pulse.shape is PulseShape.HALF_CYCLE_SECH)

    if use_closed:
        tau = sech_conformal_closed(grid, pulse.strength, pulse.polarity)
        slope = _sech_closed_slope(grid, pulse.strength, pulse.polarity)
        return ConformalMap(grid, tau, slope, pulse, crystal, closed_form=True)

    npts = grid.size
    state0 = np.concatenate([grid, np.ones(npts)])
    sr = pulse.polarity * pulse.strength

    def rhs_backward(_z, y):
        phi = y[:npts]
        tangent = y[npts:]
        dphi = sr * eval_pulse(pulse, phi)
        dtangent = sr * _envelope_derivative(pulse, phi) * tangent
        return np.concatenate([dphi, dtangent])

    final = integrate_adaptive(rhs_backward, state0, 0.0, 1.0, rtol=rtol, atol=atol)
    tau = final[:npts]
    slope = final[npts:]
    return ConformalMap(grid, tau, slope, pulse, crystal, closed_form=False)


@dataclass(frozen=True)
class CharacteristicPath:
    """One characteristic ray: depth fractions, retarded times, exit value."""

    z_frac: np.ndarray
    theta: np.ndarray
    theta_final: float


def integrate_characteristic(
    pulse: DrivingPulse,
    theta_in: float,
    z_frac_target: float = 1.0,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> CharacteristicPath:
    """Propagate one entrance time through the crystal.

    Returns the accepted-step world line ``theta(z_frac)`` from the
    entrance plane up to ``z_frac_target`` and its final retarded time.
    The conformal time of the whole line is the entrance value itself.
    """
    if not 0.0 <= z_frac_target <= 1.0:
        raise ValueError(f"z_frac_target must lie in [0, 1], got {z_frac_target}")
    sr = pulse.polarity * pulse.strength

    def rhs(_z, y):
        return -sr * eval_pulse(pulse, y)

    y0 = np.array([float(theta_in)])
    yf, z_path, y_path = integrate_adaptive(
        rhs, y0, 0.0, z_frac_target, rtol=rtol, atol=atol, record=True)
    return CharacteristicPath(z_path, y_path[:, 0], float(yf[0]))


def invert_map(cmap: ConformalMap, tau_target: float) -> float:
    """Exit retarded time with conformal time ``tau_target``.

    Refined against the map's own evaluator until the residual
    ``|tau(theta) - tau_target|`` drops below 1e-10.
    """
    if cmap.closed_form:
        return float(cmap.inverse(tau_target))
    lo, hi = cmap.tau_out[0], cmap.tau_out[-1]
    if not lo <= tau_target <= hi:
        raise WindowError(
            f"tau_target {tau_target:.6g} outside tabulated range [{lo:.6g}, {hi:.6g}]")
    theta = brentq(lambda th: cmap.tau(th) - tau_target,
                   cmap.theta_grid[0], cmap.theta_grid[-1],
                   xtol=1e-14, rtol=8.9e-16, maxiter=200)
    residual = abs(cmap.tau(theta) - tau_target)
    if residual > 1e-10:
        raise InvalidRegimeError(
            f"inverse refinement stalled: residual {residual:.3e}")
    return float(theta)


def worldline_bundle(
    pulse: DrivingPulse,
    entrance_times: np.ndarray,
    z_samples: np.ndarray,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
) -> np.ndarray:
    """World lines for a bundle of entrance times.

    Returns an array of shape ``(len(entrance_times), len(z_samples))``
    with the retarded time of each line at each requested depth fraction.
    The flow is autonomous and Lipschitz for the analytic envelopes, so
    lines never cross; their exit spacing divided by the entrance spacing
    is the reciprocal map slope, which is what makes bundle density a
    direct picture of field enhancement.
    """
    entrance = np.asarray(entrance_times, dtype=float)
    zs = np.asarray(z_samples, dtype=float)
    if zs.ndim != 1 or zs.size == 0:
        raise ValueError("z_samples must be a nonempty 1-d array")
    if np.any(zs < 0) or np.any(zs > 1) or np.any(np.diff(zs) <= 0):
        raise ValueError("z_samples must be strictly increasing within [0, 1]")
    sr = pulse.polarity * pulse.strength

    def rhs(_z, y):
        return -sr * eval_pulse(pulse, y)

    out = np.empty((entrance.size, zs.size))
    y = entrance.copy()
    z_prev = 0.0
    for j, z in enumerate(zs):
        if z > z_prev:
            y = integrate_adaptive(rhs, y, z_prev, z, rtol=rtol, atol=atol)
            z_prev = z
        out[:, j] = y
    return out


def causality_g(
    pulse: DrivingPulse,
    crystal: CrystalConfig | None = None,
    cmap: ConformalMap | None = None,
    **build_kwargs,
) -> float:
    """Largest conformal-time advance ``max(tau_out(theta) - theta)``.

    Grid scan over the tabulated map followed by a local bounded
    refinement on the map evaluator.  Never negative: outside the pulse
    the map is the identity, so zero advance is always attained.
    """
    if cmap is None:
        if crystal is None:
            crystal = CrystalConfig.from_practical(n=2.57, length_um=15.0,
                                                   gamma0_thz=26.0)
        cmap = build_conformal_map(pulse, crystal, **build_kwargs)
    adv = cmap.advance
    i = int(np.argmax(adv))
    lo = cmap.theta_grid[max(i - 1, 0)]
    hi = cmap.theta_grid[min(i + 1, cmap.theta_grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda th: -(cmap.tau(th) - th),
                              bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        refined = -res.fun
    else:
        refined = adv[i]
    return float(max(0.0, adv[i], refined))


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the physical validity gate for one configuration."""

    strength: float
    r_max: float
    budget: float
    g: float
    svaa_ok: bool
    causality_ok: bool

    @property
    def ok(self) -> bool:
        return self.causality_ok


def check_validity(
    pulse: DrivingPulse,
    crystal: CrystalConfig,
    cmap: ConformalMap | None = None,
    raise_on_failure: bool = False,
    **build_kwargs,
) -> ValidityReport:
    """Run the regime checks: envelope-approximation bound and causality.

    A strength beyond half the envelope-approximation bound only warns
    (the model degrades gracefully there); an advance beyond the causality
    budget marks the configuration invalid and, with
    ``raise_on_failure``, raises :class:`CausalityError`.
    """
    r_max = svaa_rmax(crystal)
    budget = causality_budget(crystal)
    g = causality_g(pulse, crystal, cmap=cmap, **build_kwargs)
    svaa_ok = pulse.strength < _SVAA_WARN_FRACTION * r_max
    causality_ok = g <= budget * (1.0 + 1e-12)
    if not svaa_ok:
        warnings.warn(
            f"strength {pulse.strength:g} is beyond half the envelope-"
            f"approximation bound {r_max:g}; treat results as qualitative",
            stacklevel=2)
    report = ValidityReport(pulse.strength, r_max, budget, g, svaa_ok, causality_ok)
    if raise_on_failure and not causality_ok:
        raise CausalityError(
            f"conformal advance {g:g} exceeds the front-velocity budget {budget:g}")
    return report
