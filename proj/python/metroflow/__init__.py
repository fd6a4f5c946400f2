"""Metro bottleneck simulation and spline NPIV estimation."""

from ._metroflow import (
    CALIBRATED_CRITICAL_PAX,
    CollisionError,
    ConfigError,
    DomainError,
    InsufficientDataError,
    NumericalError,
    bspline_basis,
    calibrate,
    difference_penalty,
    fit_2sls,
    fit_npiv,
    monte_carlo,
    scenario_names,
    simulate,
    spearman,
    synthetic_samples,
)

__version__ = "0.1.0"

__all__ = [
    "CALIBRATED_CRITICAL_PAX",
    "CollisionError",
    "ConfigError",
    "DomainError",
    "InsufficientDataError",
    "NumericalError",
    "bspline_basis",
    "calibrate",
    "difference_penalty",
    "fit_2sls",
    "fit_npiv",
    "monte_carlo",
    "scenario_names",
    "simulate",
    "spearman",
    "synthetic_samples",
]
