"""Exception hierarchy shared by all raymimo modules."""


class RayMimoError(Exception):
    """Base class for every error raised by raymimo."""


class DomainError(RayMimoError, ValueError):
    """Argument outside the domain of a function (e.g. non-finite input)."""


class BesselOverflowError(RayMimoError, OverflowError):
    """Result magnitude exceeds the double-precision range."""


class QuadratureAccuracyError(RayMimoError):
    """Adaptive quadrature did not meet its tolerance.

    Attributes
    ----------
    estimate : complex
        Best estimate reached before giving up.
    error : float
        Estimated absolute error of ``estimate``.
    """

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class UnsupportedVariantError(RayMimoError, TypeError):
    """Operation not defined for the given angular-model variant."""


class ConfigurationError(RayMimoError, ValueError):
    """Incompatible or invalid configuration."""


class DimensionError(RayMimoError, ValueError):
    """Vectors of mismatched length."""


class DegenerateEnsembleError(RayMimoError):
    """Monte Carlo ensemble produced a zero denominator."""
