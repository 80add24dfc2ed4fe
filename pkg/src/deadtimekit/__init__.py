"""Simulation, histogramming and maximum-likelihood flux estimation for
photon-counting detectors with non-paralyzable deadtime."""

from ._kernels import BACKEND
from .core import (
    ActiveFractionHistogram,
    ConfigError,
    CountHistogram,
    DetectorConfig,
    FluxCurve,
    ShotTimestamps,
    bin_edges,
)
from .estimator import (
    ChebyshevModel,
    FitResult,
    FluxOverflowError,
    OptimizerSettings,
    SplineModel,
    chebyshev_eval,
    cross_validate,
    forward_flux,
    minimize,
    thin_alternating,
    trim_spline_knots,
)
from .evaluation import evaluation_loss, optimal_scale, rmse
from .histograms import (
    active_fraction,
    build_active_histogram,
    build_count_histogram,
    measured_rate,
)
from .models import (
    NonPhysicalEstimateError,
    deadtime_loss,
    muller_correct,
    muller_equivalence_check,
    poisson_loss,
)
from .simulator import (
    AttenuationSpec,
    GaussianTargetSpec,
    apply_deadtime,
    attenuate,
    constant_flux,
    gaussian_flux,
    sample_poisson_arrivals,
    simulate_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveFractionHistogram",
    "AttenuationSpec",
    "BACKEND",
    "ChebyshevModel",
    "ConfigError",
    "CountHistogram",
    "DetectorConfig",
    "FitResult",
    "FluxCurve",
    "FluxOverflowError",
    "GaussianTargetSpec",
    "NonPhysicalEstimateError",
    "OptimizerSettings",
    "ShotTimestamps",
    "SplineModel",
    "active_fraction",
    "apply_deadtime",
    "attenuate",
    "bin_edges",
    "build_active_histogram",
    "build_count_histogram",
    "chebyshev_eval",
    "constant_flux",
    "cross_validate",
    "deadtime_loss",
    "evaluation_loss",
    "forward_flux",
    "gaussian_flux",
    "measured_rate",
    "minimize",
    "muller_correct",
    "muller_equivalence_check",
    "optimal_scale",
    "poisson_loss",
    "rmse",
    "sample_poisson_arrivals",
    "simulate_dataset",
    "thin_alternating",
    "trim_spline_knots",
]
