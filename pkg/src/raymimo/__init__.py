"""Ray-based massive MIMO channels: synthesis, Monte Carlo metrics and
asymptotic interference predictors for linear and planar arrays."""

from . import angular, array, asymptotics, metrics, scheduler, specialfn
from .errors import (
    BesselOverflowError,
    ConfigurationError,
    DegenerateEnsembleError,
    DimensionError,
    DomainError,
    QuadratureAccuracyError,
    RayMimoError,
    UnsupportedVariantError,
)

__version__ = "0.1.0"

__all__ = [
    "angular",
    "array",
    "asymptotics",
    "metrics",
    "scheduler",
    "specialfn",
    "BesselOverflowError",
    "ConfigurationError",
    "DegenerateEnsembleError",
    "DimensionError",
    "DomainError",
    "QuadratureAccuracyError",
    "RayMimoError",
    "UnsupportedVariantError",
]
