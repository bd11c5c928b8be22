"""Electro-optic readout of the remapped vacuum field.

A Gaussian probe of duration ``fwhm`` samples the exit field at delay
``t_d``.  Folding the probe response through the conformal map turns the
measurement into a single effective kernel acting on the *input* vacuum
field,

    K(u) = R(t_d - T(u)),        T = inverse of tau_out,

so the detected variance reduces to a positive-frequency quadrature

    V(t_d) = integral_0^inf  Omega |K~(Omega)|^2 dOmega

with the overall vacuum prefactor set to one.  For the undriven crystal
``K~`` is the probe spectrum itself and the integral evaluates to
``4 ln 2 / fwhm**2`` exactly, which anchors the self-checks.

All public entry points take SI seconds; internally everything runs in the
dimensionless units of the map (times gamma0).  The computation is pure
and deterministic: identical inputs produce identical floats, traces can
be evaluated delay-by-delay in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .conformal import ConformalMap
from .errors import ConvergenceError, InvalidProbeError, WindowError

__all__ = [
    "ProbeKernel",
    "VarianceTrace",
    "ConvergenceReport",
    "vacuum_variance",
    "detected_variance",
    "rdv_trace",
    "simplified_rdv",
    "rdn_from_variance",
    "verify_convergence",
]

_LN2 = math.log(2.0)

# |probe spectrum|^2 = exp(-(x/_SPECTRAL_CUT)^2 * ...) drops below 4e-18 at
# the cut x = omega * fwhm = 14.9, so nothing measurable lives beyond it
_SPECTRAL_CUT = 14.9
# kernel support half-width in probe widths: R there is exp(-4 ln2 * 7.5^2)
_SUPPORT_WIDTHS = 7.5
# time-sampling margin above the Nyquist rate of the highest kept frequency
_NYQUIST_MARGIN = 1.25

DEFAULT_OMEGA_POINTS = 4096
# the analytic-vs-quadrature agreement demanded of the vacuum baseline
VACUUM_SELF_CHECK_TOL = 1e-8
CONVERGENCE_TOL = 1e-6


@dataclass(frozen=True)
class ProbeKernel:
    """Gaussian probe envelope, unit area, ``fwhm`` seconds wide."""

    fwhm: float

    def __post_init__(self) -> None:
        if not (self.fwhm > 0.0 and math.isfinite(self.fwhm)):
            raise InvalidProbeError(f"probe fwhm must be positive, got {self.fwhm}")

    def response(self, t):
        """Normalized intensity response R(t), integral one."""
        t = np.asarray(t, dtype=float)
        amp = 2.0 * math.sqrt(_LN2) / (math.sqrt(math.pi) * self.fwhm)
        out = amp * np.exp(-4.0 * _LN2 * (t / self.fwhm) ** 2)
        return float(out) if out.ndim == 0 else out

    def spectrum(self, omega):
        """Fourier amplitude of R, normalized to one at DC."""
        om = np.asarray(omega, dtype=float)
        out = np.exp(-(om * self.fwhm) ** 2 / (16.0 * _LN2))
        return float(out) if out.ndim == 0 else out


def vacuum_variance(probe: ProbeKernel, self_check: bool = True) -> float:
    """Detected vacuum variance, ``4 ln 2 / fwhm**2`` (1/s^2).

    With ``self_check`` (default) the positive-frequency quadrature is
    re-evaluated numerically on a dense grid and must agree with the
    closed form to 1e-8 relative, else :class:`ConvergenceError`.
    """
    analytic = 4.0 * _LN2 / probe.fwhm**2
    if self_check:
        omega = np.linspace(0.0, _SPECTRAL_CUT / probe.fwhm, 65537)
        numeric = np.trapezoid(omega * probe.spectrum(omega) ** 2, omega)
        rel = abs(numeric - analytic) / analytic
        if rel > VACUUM_SELF_CHECK_TOL:
            raise ConvergenceError(
                f"vacuum quadrature off by {rel:.3e} relative (gate 1e-8)")
    return analytic


def _variances_dimensionless(
    cmap: ConformalMap,
    theta_p: float,
    theta_d: np.ndarray,
    omega_points: int,
    refine: int = 1,
) -> tuple[np.ndarray, float]:
    """Core quadrature: detected and vacuum variance in map units.

    The frequency cut is stretched by the reciprocal minimum slope: map
    compression shifts kernel content upward by exactly that factor, and a
    fixed cut would leak squeezed-burst spectral weight.  ``refine``
    doubles (or more) both the cut and the point count while the sampling
    step follows the Nyquist rule, which is the convergence-gate knob.
    """
    stretch = max(1.0, 1.0 / cmap.min_slope)
    omega_max = _SPECTRAL_CUT / theta_p * stretch * refine
    n_omega = omega_points * refine
    omega = np.linspace(0.0, omega_max, n_omega)

    half_width = _SUPPORT_WIDTHS * theta_p
    lo_exit = theta_d.min() - half_width
    hi_exit = theta_d.max() + half_width
    if not cmap.closed_form:
        grid_lo, grid_hi = cmap.theta_grid[0], cmap.theta_grid[-1]
        if lo_exit < grid_lo or hi_exit > grid_hi:
            raise WindowError(
                f"kernel support [{lo_exit:.4g}, {hi_exit:.4g}] exceeds the map "
                f"span [{grid_lo:g}, {grid_hi:g}]; rebuild the map wider")
    u_lo = float(cmap.tau(lo_exit))
    u_hi = float(cmap.tau(hi_exit))

    du_target = math.pi / (_NYQUIST_MARGIN * omega_max)
    n_u = int(math.ceil((u_hi - u_lo) / du_target)) + 2
    u = np.linspace(u_lo, u_hi, n_u)
    du = u[1] - u[0]

    exit_times = np.asarray(cmap.inverse(u))
    amp = 2.0 * math.sqrt(_LN2) / (math.sqrt(math.pi) * theta_p)
    kernels = amp * np.exp(
        -4.0 * _LN2 * ((theta_d[:, None] - exit_times[None, :]) / theta_p) ** 2)

    # trapezoid in u (end weights are irrelevant: the kernel is dead there)
    weights_u = np.full(n_u, du)
    weights_u[0] = weights_u[-1] = du / 2.0
    kw = (kernels * weights_u).T  # (n_u, n_delays)

    d_omega = omega[1] - omega[0]
    w_omega = omega * d_omega
    w_omega[0] *= 0.5
    w_omega[-1] *= 0.5

    variance = np.zeros(theta_d.size)
    chunk = 128
    for a in range(0, n_omega, chunk):
        om_c = omega[a:a + chunk]
        phase = np.exp(1j * om_c[:, None] * u[None, :])
        spectra = phase @ kw
        variance += w_omega[a:a + chunk] @ (spectra.real**2 + spectra.imag**2)

    vac_weight = np.exp(-(omega * theta_p) ** 2 / (8.0 * _LN2))
    vacuum = float(np.trapezoid(omega * vac_weight, omega))
    return variance, vacuum


def detected_variance(
    cmap: ConformalMap,
    probe: ProbeKernel,
    delay,
    omega_points: int = DEFAULT_OMEGA_POINTS,
):
    """Detected variance V(t_d) in 1/s^2 for delay(s) in seconds."""
    gamma0 = cmap.crystal.gamma0
    theta_d = np.atleast_1d(np.asarray(delay, dtype=float)) * gamma0
    v_dimless, _ = _variances_dimensionless(
        cmap, probe.fwhm * gamma0, theta_d, omega_points)
    v = v_dimless * gamma0**2
    return float(v[0]) if np.ndim(delay) == 0 else v


@dataclass(frozen=True)
class VarianceTrace:
    """A sampled variance trace and its derived quantities.

    ``delays`` in seconds, ``variance`` and ``vacuum`` in 1/s^2 (common
    prefactor one), the rest dimensionless.  ``degree_pct`` stays None
    until a fitted normalization supplies it.
    """

    delays: np.ndarray
    variance: np.ndarray
    vacuum: float
    rdv: np.ndarray
    rdv_simplified: np.ndarray
    degree_pct: np.ndarray | None = None

    def with_degree(self, a1: float) -> "VarianceTrace":
        """Attach the fitted degree of squeezing, ``-rdv / a1`` in percent."""
        if a1 <= 0:
            raise ValueError("fit amplitude must be positive")
        return replace(self, degree_pct=-self.rdv / a1 * 100.0)


def rdv_trace(
    cmap: ConformalMap,
    probe: ProbeKernel,
    delays,
    omega_points: int = DEFAULT_OMEGA_POINTS,
) -> VarianceTrace:
    """Relative detected variance along a delay grid.

    ``rdv = (V - V_vac) / V_vac`` with the vacuum reference evaluated on
    the same frequency grid as V itself, so an undriven crystal yields
    exact zeros instead of quadrature noise.  ``rdv_simplified`` is the
    instantaneous-probe picture ``slope**2 - 1`` at the same delays.
    """
    gamma0 = cmap.crystal.gamma0
    t_d = np.asarray(delays, dtype=float)
    if t_d.ndim != 1 or t_d.size == 0:
        raise ValueError("delays must be a nonempty 1-d array of seconds")
    theta_d = t_d * gamma0
    v_dimless, vac_dimless = _variances_dimensionless(
        cmap, probe.fwhm * gamma0, theta_d, omega_points)
    rdv = v_dimless / vac_dimless - 1.0
    simplified = np.asarray(cmap.slope_at(theta_d)) ** 2 - 1.0
    return VarianceTrace(
        delays=t_d,
        variance=v_dimless * gamma0**2,
        vacuum=vac_dimless * gamma0**2,
        rdv=rdv,
        rdv_simplified=simplified,
    )


def simplified_rdv(cmap: ConformalMap, delays):
    """Instantaneous-probe variance change, ``slope(t_d)**2 - 1``.

    Negative where the conformal flow decelerates (squeezing), positive
    where it accelerates.  At a zero crossing of the driving envelope the
    slope is exp(-polarity * strength), so this quantity depends on the
    strength exponentially there.
    """
    gamma0 = cmap.crystal.gamma0
    th = np.asarray(delays, dtype=float) * gamma0
    out = np.asarray(cmap.slope_at(th)) ** 2 - 1.0
    return float(out) if out.ndim == 0 else out


def rdn_from_variance(variance: float, vacuum: float, shot_noise: float) -> float:
    """Relative differential noise of a balanced electro-optic detector.

    ``(sqrt(V) - sqrt(V_vac)) * sqrt(V_vac) / shot_noise`` with the probe
    shot-noise variance as the denominator scale.
    """
    if variance < 0 or vacuum <= 0 or shot_noise <= 0:
        raise ValueError("variances must be nonnegative and references positive")
    root_vac = math.sqrt(vacuum)
    return (math.sqrt(variance) - root_vac) * root_vac / shot_noise


@dataclass(frozen=True)
class ConvergenceReport:
    """Result of the step-halving / cut-doubling self check."""

    max_rel_change: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_rel_change <= self.tolerance


def verify_convergence(
    cmap: ConformalMap,
    probe: ProbeKernel,
    delays,
    omega_points: int = DEFAULT_OMEGA_POINTS,
    tolerance: float = CONVERGENCE_TOL,
    raise_on_failure: bool = False,
) -> ConvergenceReport:
    """Gate the quadrature: refine everything 2x and compare V.

    Doubles the frequency cut and point count, which by the Nyquist rule
    also halves the kernel sampling step.  The relative change in every
    reported variance must stay below ``tolerance`` (default 1e-6).
    """
    gamma0 = cmap.crystal.gamma0
    theta_d = np.atleast_1d(np.asarray(delays, dtype=float)) * gamma0
    theta_p = probe.fwhm * gamma0
    v1, _ = _variances_dimensionless(cmap, theta_p, theta_d, omega_points, refine=1)
    v2, _ = _variances_dimensionless(cmap, theta_p, theta_d, omega_points, refine=2)
    rel = float(np.max(np.abs(v2 - v1) / v1))
    report = ConvergenceReport(rel, tolerance)
    if raise_on_failure and not report.passed:
        raise ConvergenceError(
            f"variance quadrature not converged: relative change {rel:.3e}")
    return report
