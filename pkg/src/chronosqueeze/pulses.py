"""Driving-pulse catalogue for the time-domain squeezing simulator.

All pulse envelopes are expressed in the comoving (retarded) frame of the
crystal and in dimensionless units: time enters as ``theta = gamma0 * t``
where ``gamma0`` is the inverse pulse duration (angular rate), and the field
amplitude is scaled out into the dimensionless squeezing strength carried by
:class:`DrivingPulse`.  What remains is a unit-amplitude envelope ``e(theta)``.

Built-in envelopes
------------------
``HALF_CYCLE_SECH``
    ``e = sech(theta)``.  Even, positive, unit peak.  The workhorse shape:
    it admits a closed-form exit map (see :mod:`chronosqueeze.conformal`)
    and an analytic spectrum.
``REALISTIC_HALF_CYCLE``
    ``e = sech(theta) - 0.1 * sech(theta / 10)``.  Even.  The weak, ten
    times longer counter-polarized wing cancels the DC component exactly,
    as any free-space pulse must, at the price of slow (scale-10) decay.
``SINGLE_CYCLE``
    ``e = (exp(-theta**2) - 1) / theta`` with ``e(0) = 0``.  Odd, zero DC
    component by symmetry, peak magnitude ~0.638 near ``|theta| ~ 1.12``.
    Note the slow ``-1/theta`` far tail: this envelope never becomes
    negligible on any practical window.
``SAMPLED``
    Arbitrary tabulated envelope, interpolated monotone-cubically inside
    its grid and refusing to extrapolate outside it.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import PulseRangeError, UnsupportedShapeError

__all__ = [
    "PulseShape",
    "Parity",
    "DrivingPulse",
    "eval_pulse",
    "pulse_third_derivative",
    "pulse_spectrum_sech",
    "load_sampled_grid",
]

# series branch for the single-cycle shape: below this |theta| the closed
# form (exp(-theta^2)-1)/theta loses digits to cancellation
_SINGLE_CYCLE_SERIES_CUTOFF = 1e-4
# same concern for its third derivative, which cancels as theta^4
_SINGLE_CYCLE_D3_SERIES_CUTOFF = 5e-2


class PulseShape(enum.Enum):
    HALF_CYCLE_SECH = "half_cycle_sech"
    REALISTIC_HALF_CYCLE = "realistic_half_cycle"
    SINGLE_CYCLE = "single_cycle"
    SAMPLED = "sampled"


class Parity(enum.Enum):
    EVEN = "even"
    ODD = "odd"
    NONE = "none"


_SHAPE_PARITY = {
    PulseShape.HALF_CYCLE_SECH: Parity.EVEN,
    PulseShape.REALISTIC_HALF_CYCLE: Parity.EVEN,
    PulseShape.SINGLE_CYCLE: Parity.ODD,
    PulseShape.SAMPLED: Parity.NONE,
}


@dataclass(frozen=True)
class DrivingPulse:
    """A coherent driving pulse: envelope shape plus interaction strength.

    Parameters
    ----------
    shape : PulseShape
        Which envelope to use.
    strength : float
        Dimensionless squeezing strength, ``|peak field * coupling| *
        gamma0 * length / (n * c0)``.  Must be nonnegative; the sign of the
        product lives in `polarity`.
    polarity : int
        Sign of the field-coupling product, +1 or -1.  Flipping it reverses
        the direction of the conformal-time flow.
    sample_theta, sample_value : ndarray, optional
        Tabulated grid for ``SAMPLED`` pulses; ignored otherwise.
    """

    shape: PulseShape
    strength: float
    polarity: int = 1
    sample_theta: np.ndarray | None = field(default=None, repr=False)
    sample_value: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.strength < 0:
            raise ValueError(f"strength must be >= 0, got {self.strength}")
        if self.polarity not in (-1, 1):
            raise ValueError(f"polarity must be +1 or -1, got {self.polarity}")
        if self.shape is PulseShape.SAMPLED:
            th, val = self.sample_theta, self.sample_value
            if th is None or val is None:
                raise ValueError("sampled pulse needs sample_theta and sample_value")
            th = np.asarray(th, dtype=float)
            val = np.asarray(val, dtype=float)
            if th.ndim != 1 or th.shape != val.shape or th.size < 4:
                raise ValueError("sampled grid must be two equal 1-d arrays, >= 4 points")
            if not np.all(np.diff(th) > 0):
                raise ValueError("sample_theta must be strictly increasing")
            object.__setattr__(self, "sample_theta", th)
            object.__setattr__(self, "sample_value", val)
            object.__setattr__(self, "_interp", PchipInterpolator(th, val, extrapolate=False))
        elif self.sample_theta is not None or self.sample_value is not None:
            raise ValueError("sample grids are only meaningful for SAMPLED pulses")

    @property
    def parity(self) -> Parity:
        return _SHAPE_PARITY[self.shape]

    @classmethod
    def half_cycle(cls, strength: float, polarity: int = 1) -> "DrivingPulse":
        return cls(PulseShape.HALF_CYCLE_SECH, strength, polarity)

    @classmethod
    def realistic_half_cycle(cls, strength: float, polarity: int = 1) -> "DrivingPulse":
        return cls(PulseShape.REALISTIC_HALF_CYCLE, strength, polarity)

    @classmethod
    def single_cycle(cls, strength: float, polarity: int = 1) -> "DrivingPulse":
        return cls(PulseShape.SINGLE_CYCLE, strength, polarity)

    @classmethod
    def sampled(cls, theta: np.ndarray, value: np.ndarray, strength: float,
                polarity: int = 1) -> "DrivingPulse":
        return cls(PulseShape.SAMPLED, strength, polarity,
                   sample_theta=np.asarray(theta, dtype=float),
                   sample_value=np.asarray(value, dtype=float))

    @classmethod
    def sampled_from_csv(cls, path: str | Path, strength: float,
                         polarity: int = 1) -> "DrivingPulse":
        theta, value = load_sampled_grid(path)
        return cls.sampled(theta, value, strength, polarity)

    def envelope(self, theta):
        """Vectorized envelope evaluation, ``e(theta)``."""
        return eval_pulse(self, theta)


def load_sampled_grid(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read a two-column (theta, value) CSV with a mandatory header row."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0]
    try:
        float(header[0])
    except (ValueError, IndexError):
        pass
    else:
        raise ValueError(f"{path}: first row must be a text header, found numbers")
    data = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ValueError(f"{path}:{i}: expected 2 columns, found {len(row)}")
        data.append((float(row[0]), float(row[1])))
    if len(data) < 4:
        raise ValueError(f"{path}: need at least 4 sample rows")
    arr = np.asarray(data, dtype=float)
    theta, value = arr[:, 0], arr[:, 1]
    if not np.all(np.diff(theta) > 0):
        raise ValueError(f"{path}: theta column must be strictly increasing")
    return theta, value


def _single_cycle_envelope(theta: np.ndarray) -> np.ndarray:
    out = np.empty_like(theta)
    small = np.abs(theta) < _SINGLE_CYCLE_SERIES_CUTOFF
    ts = theta[small]
    # e = -theta + theta^3/2 - ...; omitted term < 1e-12 below the cutoff
    out[small] = -ts + 0.5 * ts**3
    tl = theta[~small]
    out[~small] = np.expm1(-tl**2) / tl
    return out


def eval_pulse(pulse: DrivingPulse, theta) -> np.ndarray | float:
    """Evaluate the unit-amplitude envelope ``e(theta)``.

    Sampled pulses raise :class:`PulseRangeError` when any requested point
    lies outside their tabulated grid; nothing is ever extrapolated.
    """
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)

    if pulse.shape is PulseShape.HALF_CYCLE_SECH:
        out = 1.0 / np.cosh(th)
    elif pulse.shape is PulseShape.REALISTIC_HALF_CYCLE:
        out = 1.0 / np.cosh(th) - 0.1 / np.cosh(th / 10.0)
    elif pulse.shape is PulseShape.SINGLE_CYCLE:
        out = _single_cycle_envelope(th)
    elif pulse.shape is PulseShape.SAMPLED:
        grid = pulse.sample_theta
        if th.min() < grid[0] or th.max() > grid[-1]:
            raise PulseRangeError(
                f"requested theta in [{th.min():g}, {th.max():g}] outside sampled "
                f"grid [{grid[0]:g}, {grid[-1]:g}]")
        out = pulse._interp(th)
    else:  # pragma: no cover - enum is exhaustive
        raise UnsupportedShapeError(f"unknown shape {pulse.shape}")
    return float(out[0]) if scalar else out


def _sech_third_derivative(x: np.ndarray) -> np.ndarray:
    t = np.tanh(x)
    s = 1.0 / np.cosh(x)
    return -(t**3 * s - 5.0 * t * s**3)


def _single_cycle_third_derivative(theta: np.ndarray) -> np.ndarray:
    out = np.empty_like(theta)
    small = np.abs(theta) < _SINGLE_CYCLE_D3_SERIES_CUTOFF
    ts = theta[small]
    # d3/dtheta3 of the series sum_k (-1)^k theta^(2k-1)/k!
    out[small] = 3.0 - 10.0 * ts**2 + 8.75 * ts**4 - 4.2 * ts**6
    tl = theta[~small]
    # closed form [6 - (8 th^6 + 6 th^2 + 6) exp(-th^2)] / th^4 cancels near 0
    out[~small] = (6.0 - (8.0 * tl**6 + 6.0 * tl**2 + 6.0) * np.exp(-tl**2)) / tl**4
    return out


def pulse_third_derivative(pulse: DrivingPulse, theta) -> np.ndarray | float:
    """Analytic ``d^3 e / dtheta^3`` for the built-in analytic shapes.

    This is the curvature rate that sets the leading-order detected
    variance at weak driving.  Sampled pulses are rejected: a tabulated
    grid carries no trustworthy third derivative.
    """
    if pulse.shape is PulseShape.SAMPLED:
        raise UnsupportedShapeError("third derivative needs an analytic shape")
    th = np.asarray(theta, dtype=float)
    scalar = th.ndim == 0
    th = np.atleast_1d(th)
    if pulse.shape is PulseShape.HALF_CYCLE_SECH:
        out = _sech_third_derivative(th)
    elif pulse.shape is PulseShape.REALISTIC_HALF_CYCLE:
        out = _sech_third_derivative(th) - 1e-4 * _sech_third_derivative(th / 10.0)
    else:
        out = _single_cycle_third_derivative(th)
    return float(out[0]) if scalar else out


def pulse_spectrum_sech(omega) -> np.ndarray | float:
    """Positive-frequency spectrum of the sech envelope.

    In units of (peak amplitude / gamma0) the transform of ``sech`` is
    ``sech(pi * omega / 2) / 2`` for the dimensionless frequency
    ``omega`` (physical angular frequency over gamma0).  Even in omega,
    value 1/2 at DC, exponential high-frequency falloff.
    """
    om = np.asarray(omega, dtype=float)
    out = 0.5 / np.cosh(math.pi * om / 2.0)
    return float(out) if out.ndim == 0 else out
