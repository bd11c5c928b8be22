"""Exception taxonomy shared across the package.

Two of these matter for process exit codes (see ``cli``): ValidityError
maps to exit code 2, NumericsError and its subclasses map to exit code 3.
Everything else is an ordinary usage error.
"""

from __future__ import annotations

__all__ = [
    "ChronoSqueezeError",
    "PulseRangeError",
    "UnsupportedShapeError",
    "InvalidRegimeError",
    "ValidityError",
    "CausalityError",
    "WindowError",
    "InvalidProbeError",
    "NumericsError",
    "IntegrationError",
    "ConvergenceError",
    "FitError",
]


class ChronoSqueezeError(Exception):
    """Base class for all package-specific errors."""


class PulseRangeError(ChronoSqueezeError, ValueError):
    """Evaluation outside the tabulated grid of a sampled pulse."""


class UnsupportedShapeError(ChronoSqueezeError, TypeError):
    """Operation requires an analytic pulse shape."""


class ValidityError(ChronoSqueezeError):
    """Configuration violates a physical validity bound."""


class CausalityError(ValidityError):
    """Conformal-time advance exceeds the front-velocity budget."""


class InvalidRegimeError(ChronoSqueezeError):
    """Exit times are not strictly monotone; the map has no inverse."""


class WindowError(ChronoSqueezeError, ValueError):
    """Requested evaluation window exceeds the tabulated map range."""


class InvalidProbeError(ChronoSqueezeError, ValueError):
    """Probe kernel parameters out of domain (e.g. nonpositive width)."""


class NumericsError(ChronoSqueezeError):
    """Numerical procedure failed to reach its target accuracy."""


class IntegrationError(NumericsError):
    """Adaptive step-size control collapsed (step underflow or overflow)."""


class ConvergenceError(NumericsError):
    """Self-check quadrature or refinement gate failed its tolerance."""


class FitError(NumericsError):
    """Nonlinear least squares failed to converge or data is degenerate."""
