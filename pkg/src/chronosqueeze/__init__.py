"""Time-domain simulator for subcycle squeezed vacuum generation.

A strong few-femtosecond pulse drives a thin nonlinear crystal; the
copropagating quantum field experiences the drive as a local remapping of
time.  This package builds that conformal exit-time map, folds it through
an electro-optic Gaussian probe to predict detected variance traces, and
calibrates strength sweeps against the exponential squeezing law.  A
first-order frequency-domain route provides independent cross-checks.
"""

from .conformal import (
    CharacteristicPath,
    ConformalMap,
    CrystalConfig,
    ValidityReport,
    build_conformal_map,
    causality_budget,
    causality_g,
    check_validity,
    integrate_characteristic,
    invert_map,
    sech_conformal_closed,
    svaa_rmax,
    worldline_bundle,
)
from .detection import (
    ConvergenceReport,
    ProbeKernel,
    VarianceTrace,
    detected_variance,
    rdn_from_variance,
    rdv_trace,
    simplified_rdv,
    vacuum_variance,
    verify_convergence,
)
from .errors import (
    CausalityError,
    ChronoSqueezeError,
    ConvergenceError,
    FitError,
    IntegrationError,
    InvalidProbeError,
    InvalidRegimeError,
    NumericsError,
    PulseRangeError,
    UnsupportedShapeError,
    ValidityError,
    WindowError,
)
from .fitting import (
    FitBranch,
    FitResult,
    default_strength_grid,
    degree_from_fit,
    extrema_vs_r,
    fit_exponential,
)
from .perturbation import SqueezeKernel, pt_rdv_shape, pt_variance_sech, xi_sym
from .pulses import (
    DrivingPulse,
    Parity,
    PulseShape,
    eval_pulse,
    load_sampled_grid,
    pulse_spectrum_sech,
    pulse_third_derivative,
)
from .scenarios import ScenarioConfig, list_presets, load_config, run_scenario

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # pulses
    "PulseShape", "Parity", "DrivingPulse", "eval_pulse",
    "pulse_third_derivative", "pulse_spectrum_sech", "load_sampled_grid",
    # conformal
    "CrystalConfig", "ConformalMap", "CharacteristicPath", "ValidityReport",
    "sech_conformal_closed", "integrate_characteristic", "build_conformal_map",
    "invert_map", "worldline_bundle", "causality_g", "svaa_rmax",
    "causality_budget", "check_validity",
    # detection
    "ProbeKernel", "VarianceTrace", "ConvergenceReport", "vacuum_variance",
    "detected_variance", "rdv_trace", "simplified_rdv", "rdn_from_variance",
    "verify_convergence",
    # perturbation
    "SqueezeKernel", "xi_sym", "pt_variance_sech", "pt_rdv_shape",
    # fitting
    "FitBranch", "FitResult", "default_strength_grid", "extrema_vs_r",
    "fit_exponential", "degree_from_fit",
    # scenarios
    "ScenarioConfig", "list_presets", "load_config", "run_scenario",
    # errors
    "ChronoSqueezeError", "PulseRangeError", "UnsupportedShapeError",
    "InvalidRegimeError", "ValidityError", "CausalityError", "WindowError",
    "InvalidProbeError", "NumericsError", "IntegrationError",
    "ConvergenceError", "FitError",
]
