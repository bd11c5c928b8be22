"""Weak-drive oracle: kernel symmetries and the closed-form variance."""

from __future__ import annotations

import numpy as np
import pytest

from chronosqueeze.errors import UnsupportedShapeError
from chronosqueeze.perturbation import (
    SqueezeKernel,
    pt_rdv_shape,
    pt_variance_sech,
    xi_sym,
)
from chronosqueeze.pulses import DrivingPulse, pulse_spectrum_sech, \
    pulse_third_derivative

PT_AT_1_R01 = -0.012502110424174297  # frozen: pt_variance_sech(1, 0.1)


def test_xi_sym_structure():
    pulse = DrivingPulse.half_cycle(0.1)
    # factorizes into sqrt(|w w1|) times the envelope spectrum at w + w1
    for w, w1 in [(1.0, 1.0), (0.3, 2.2), (1.7, 0.01)]:
        expected = -1j * 0.1 * np.sqrt(w * w1) * pulse_spectrum_sech(w + w1)
        assert xi_sym(w, w1, pulse) == pytest.approx(expected, abs=1e-15)
    # exchange symmetry, zero frequency annihilation, strength linearity
    assert xi_sym(0.4, 1.9, pulse) == xi_sym(1.9, 0.4, pulse)
    assert xi_sym(0.0, 1.0, pulse) == 0.0
    double = DrivingPulse.half_cycle(0.2)
    assert xi_sym(1.0, 1.0, double) == pytest.approx(
        2.0 * xi_sym(1.0, 1.0, pulse), abs=1e-15)
    # polarity flips the sign of the whole kernel
    flipped = DrivingPulse.half_cycle(0.1, polarity=-1)
    assert xi_sym(1.0, 1.0, flipped) == -xi_sym(1.0, 1.0, pulse)


def test_xi_sym_purely_imaginary_and_vectorized():
    pulse = DrivingPulse.half_cycle(0.5)
    w = np.linspace(0.1, 3.0, 7)
    vals = xi_sym(w, w[::-1], pulse)
    assert vals.shape == (7,)
    np.testing.assert_allclose(vals.real, 0.0, atol=1e-18)


def test_xi_sym_rejects_other_shapes():
    with pytest.raises(UnsupportedShapeError):
        xi_sym(1.0, 1.0, DrivingPulse.single_cycle(0.1))


def test_squeeze_kernel_wrapper():
    pulse = DrivingPulse.half_cycle(0.1, polarity=-1)
    kernel = SqueezeKernel(pulse)
    assert kernel.strength == 0.1
    assert kernel.polarity == -1
    assert kernel(1.0, 2.0) == xi_sym(1.0, 2.0, pulse)


def test_pt_variance_frozen_value_and_parity():
    assert pt_variance_sech(1.0, 0.1) == pytest.approx(PT_AT_1_R01,
                                                       abs=1e-15)
    theta = np.linspace(-5, 5, 101)
    vals = pt_variance_sech(theta, 0.3)
    np.testing.assert_allclose(vals, -vals[::-1], atol=1e-17)  # odd
    assert pt_variance_sech(0.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        pt_variance_sech(1.0, -0.1)


def test_pt_variance_is_third_derivative():
    # the closed form is -(r/6) e''' for the sech envelope
    pulse = DrivingPulse.half_cycle(1.0)
    theta = np.linspace(-4, 4, 41)
    np.testing.assert_allclose(
        pt_variance_sech(theta, 0.6),
        -0.1 * np.asarray(pulse_third_derivative(pulse, theta)),
        atol=1e-15)


def test_pt_rdv_shape_unit_peak():
    theta = np.linspace(-8, 8, 801)
    for maker in (DrivingPulse.half_cycle, DrivingPulse.single_cycle,
                  DrivingPulse.realistic_half_cycle):
        shape = pt_rdv_shape(maker(1.0), theta)
        assert np.max(np.abs(shape)) == pytest.approx(1.0, abs=1e-15)
    # for the sech drive the shape is the normalized closed form
    sech_shape = pt_rdv_shape(DrivingPulse.half_cycle(1.0), theta)
    closed = pt_variance_sech(theta, 1.0)
    np.testing.assert_allclose(sech_shape, closed / np.max(np.abs(closed)),
                               atol=1e-14)


def test_pt_rdv_shape_rejects_sampled_and_degenerate():
    sampled = DrivingPulse.sampled(np.linspace(-1, 1, 8), np.ones(8), 1.0)
    with pytest.raises(UnsupportedShapeError):
        pt_rdv_shape(sampled, np.linspace(-1, 1, 5))
    with pytest.raises(ValueError):
        pt_rdv_shape(DrivingPulse.half_cycle(1.0), np.array([0.0]))
