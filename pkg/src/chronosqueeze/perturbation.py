"""Weak-drive perturbation theory: the independent cross-check route.

For small squeezing strength the crystal acts, to first order, as a
two-mode squeezer with the symmetrized frequency-domain kernel

    Xi(w, w1) = -i * polarity * strength
                * sign(w * w1) * sqrt(|w * w1|) * sech(pi (w + w1) / 2) / 2

(dimensionless frequencies, sech envelope).  Evaluating the resulting
normally-ordered variance with an instantaneous probe gives a closed form
proportional to the third envelope derivative.  None of this shares code
with the conformal-map route, which is the point: the full pipeline must
reproduce these shapes in the appropriate limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import UnsupportedShapeError
from .pulses import DrivingPulse, PulseShape, pulse_third_derivative

__all__ = ["SqueezeKernel", "xi_sym", "pt_variance_sech", "pt_rdv_shape"]


def xi_sym(omega, omega1, pulse: DrivingPulse):
    """First-order squeezing kernel for the sech envelope.

    Both frequencies are dimensionless (physical over gamma0).  The kernel
    is purely imaginary, symmetric under frequency exchange, linear in the
    strength, and vanishes whenever either frequency does.
    """
    if pulse.shape is not PulseShape.HALF_CYCLE_SECH:
        raise UnsupportedShapeError(
            "the analytic squeezing kernel is defined for the sech envelope")
    w = np.asarray(omega, dtype=float)
    w1 = np.asarray(omega1, dtype=float)
    prod = w * w1
    envelope = 0.5 / np.cosh(np.pi * (w + w1) / 2.0)
    out = np.asarray(-1j * pulse.polarity * pulse.strength
                     * np.sign(prod) * np.sqrt(np.abs(prod)) * envelope)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SqueezeKernel:
    """Bundled first-order kernel with its generating pulse."""

    pulse: DrivingPulse

    def __call__(self, omega, omega1):
        return xi_sym(omega, omega1, self.pulse)

    @property
    def strength(self) -> float:
        return self.pulse.strength

    @property
    def polarity(self) -> int:
        return self.pulse.polarity


def pt_variance_sech(theta_d, strength: float):
    """First-order normally-ordered variance for the sech drive.

    ``(strength / 6) * (tanh^3 sech - 5 tanh sech^3)(theta_d)``, i.e.
    ``-(strength / 6)`` times the third envelope derivative: odd in the
    sampling time, zero at the pulse center, linear in the strength.
    Units: vacuum prefactor one, instantaneous probe.
    """
    if strength < 0:
        raise ValueError("strength must be >= 0")
    th = np.asarray(theta_d, dtype=float)
    t = np.tanh(th)
    s = 1.0 / np.cosh(th)
    out = (strength / 6.0) * (t**3 * s - 5.0 * t * s**3)
    return float(out) if out.ndim == 0 else out


def pt_rdv_shape(pulse: DrivingPulse, theta_d) -> np.ndarray:
    """Predicted weak-drive trace shape, normalized to unit peak.

    Returns ``-d^3 e / d theta^3`` scaled so its largest magnitude is one.
    This is what the full detected trace must collapse onto as both the
    strength and the probe duration go to zero.  Analytic shapes only.
    """
    th = np.asarray(theta_d, dtype=float)
    shape = -np.atleast_1d(np.asarray(pulse_third_derivative(pulse, th)))
    peak = np.max(np.abs(shape))
    if peak == 0.0:
        raise ValueError("degenerate sampling grid: shape vanishes everywhere")
    out = shape / peak
    return float(out[0]) if th.ndim == 0 else out
