"""Exception hierarchy shared across the pricing engine."""


class VgPricerError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(VgPricerError, ValueError):
    """Inputs lie outside the mathematical domain of an operation."""


class EvaluationError(VgPricerError, ArithmeticError):
    """A numerical evaluation failed (branch cut, overflow, non-convergence)."""


class NegativeProbabilityError(VgPricerError):
    """Moment matching produced a transition probability below tolerance."""

    def __init__(self, message: str, skewness: float | None = None,
                 excess_kurtosis: float | None = None):
        super().__init__(message)
        self.skewness = skewness
        self.excess_kurtosis = excess_kurtosis


class UnsupportedStyleError(VgPricerError, ValueError):
    """The requested exercise style is not supported by this method."""


class InstabilityError(VgPricerError):
    """An explicit finite-difference sweep left its growth bound."""


class EstimationError(VgPricerError, ValueError):
    """A return series is unusable for fitting (too short, zero variance, ...)."""


class NotVgFittableError(EstimationError):
    """Sample kurtosis <= 3: no positive-kappa VG fit exists; use the Normal fit."""


class GridTooNarrowWarning(UserWarning):
    """Finite-difference boundary values have measurable influence at the spot."""
