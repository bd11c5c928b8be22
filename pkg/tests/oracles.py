"""Independent numerical oracles used by the test suite.

Nothing here imports from the production quadrature path beyond the map
and probe objects themselves.  The point of each function is to reach the
same physical quantity through a different discretization so that shared
bugs are unlikely.
"""

from __future__ import annotations

import math

import numpy as np

LN2 = math.log(2.0)

# mirror of the production support/cut policy so both sides integrate the
# same bandwidth; the values themselves are re-derived in the docstrings
SUPPORT_WIDTHS = 7.5   # kernel edge at exp(-4 ln2 * 7.5^2) ~ 1e-68
SPECTRAL_CUT = 14.9    # |R~|^2 at the cut ~ 4e-18


def vacuum_correlation(delta, cut):
    """Re C(dt) = int_0^cut W cos(W dt) dW, evaluated in closed form.

    The series branch keeps full precision through the x -> 0 cancellation
    of (cos x - 1) / x^2.
    """
    d = np.asarray(delta, dtype=float)
    x = cut * d
    out = np.empty_like(x)
    small = np.abs(x) < 1e-3
    xs = x[small]
    out[small] = 0.5 - xs**2 / 8.0 + xs**4 / 144.0
    xl = x[~small]
    out[~small] = np.sin(xl) / xl + (np.cos(xl) - 1.0) / xl**2
    return cut**2 * out


def brute_force_variance(cmap, theta_p, theta_d, n_points=256):
    """Detected variance by the O(N^2) double time integral (map units).

    V = sum_jk w_j w_k K(u_j) K(u_k) ReC(u_j - u_k) over a trapezoid grid
    covering the kernel support, with the same hard frequency cut the
    spectral path uses.  Returns (V, V_vac) with V_vac computed the same
    way from the undistorted probe kernel.
    """
    stretch = max(1.0, 1.0 / cmap.min_slope)
    cut = SPECTRAL_CUT / theta_p * stretch

    lo = float(cmap.tau(theta_d - SUPPORT_WIDTHS * theta_p))
    hi = float(cmap.tau(theta_d + SUPPORT_WIDTHS * theta_p))
    u = np.linspace(lo, hi, n_points)
    du = u[1] - u[0]
    w = np.full(n_points, du)
    w[0] = w[-1] = du / 2.0

    amp = 2.0 * math.sqrt(LN2) / (math.sqrt(math.pi) * theta_p)
    exit_times = np.asarray(cmap.inverse(u))
    kern = amp * np.exp(-4.0 * LN2 * ((theta_d - exit_times) / theta_p) ** 2)

    corr = vacuum_correlation(u[:, None] - u[None, :], cut)
    kw = kern * w
    v = float(kw @ corr @ kw)

    # vacuum reference: identical grid geometry, identity map
    t = np.linspace(theta_d - SUPPORT_WIDTHS * theta_p,
                    theta_d + SUPPORT_WIDTHS * theta_p, n_points)
    dt = t[1] - t[0]
    wv = np.full(n_points, dt)
    wv[0] = wv[-1] = dt / 2.0
    kv = amp * np.exp(-4.0 * LN2 * ((theta_d - t) / theta_p) ** 2) * wv
    v_vac = float(kv @ vacuum_correlation(t[:, None] - t[None, :], cut) @ kv)
    return v, v_vac


def exit_frame_variance(cmap, theta_p, theta_d, omega_points=4096,
                        n_theta=6001):
    """Same variance through the exit-time parametrization (map units).

    K~(W) = int dtheta R(theta_d - theta) slope(theta) exp(i W tau(theta)),
    which must equal the production transform by the change of variables
    u = tau(theta).  A disagreement would mean the amplitude factor and
    the Jacobian are not cancelling exactly.
    """
    stretch = max(1.0, 1.0 / cmap.min_slope)
    omega = np.linspace(0.0, SPECTRAL_CUT / theta_p * stretch, omega_points)

    theta = np.linspace(theta_d - SUPPORT_WIDTHS * theta_p,
                        theta_d + SUPPORT_WIDTHS * theta_p, n_theta)
    dth = theta[1] - theta[0]
    amp = 2.0 * math.sqrt(LN2) / (math.sqrt(math.pi) * theta_p)
    response = amp * np.exp(-4.0 * LN2 * ((theta_d - theta) / theta_p) ** 2)
    weights = response * np.asarray(cmap.slope_at(theta)) * dth
    weights[0] /= 2.0
    weights[-1] /= 2.0

    tau = np.asarray(cmap.tau(theta))
    spectra = np.exp(1j * omega[:, None] * tau[None, :]) @ weights
    integrand = omega * (spectra.real**2 + spectra.imag**2)
    return float(np.trapezoid(integrand, omega))


def third_derivative_fd(func, x, h=1e-2):
    """Central finite difference for d3f/dx3, six-point stencil, O(h^4)."""
    x = np.asarray(x, dtype=float)
    num = (func(x - 3 * h) - 8.0 * func(x - 2 * h) + 13.0 * func(x - h)
           - 13.0 * func(x + h) + 8.0 * func(x + 2 * h) - func(x + 3 * h))
    return num / (8.0 * h**3)
