"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A parameter lies outside the domain an operation accepts."""


class IncompatibleStatesError(ValueError):
    """Two joint states do not live on the same frequency grid."""


class GridResolutionError(ValueError):
    """A frequency grid is too coarse to resolve an oscillatory phase."""


class NumericFailure(RuntimeError):
    """A numerical procedure did not reach its requested accuracy.

    ``estimate`` and ``error`` carry the best value obtained and its error
    estimate, so callers can still inspect what was achieved.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class FitFailure(RuntimeError):
    """A least-squares fit failed or the data cannot constrain it."""


class FitFallbackWarning(UserWarning):
    """Emitted when a curve fit is abandoned in favour of the sample maximum."""


class DegenerateBasisWarning(UserWarning):
    """The reduced state is (nearly) maximally mixed; any basis diagonalizes it."""
