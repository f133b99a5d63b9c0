"""Exception types shared across the package."""


class RgmError(Exception):
    """Base class for package-specific errors."""


class DimensionError(RgmError, ValueError):
    """Shapes, sizes, or dimensions of inputs are inconsistent."""


class NotPsdError(RgmError, ValueError):
    """A matrix required to be positive semidefinite is not."""


class ZeroSpreadError(RgmError, ValueError):
    """A standardization was requested on degenerate (zero-spread) values."""


class NormalizationError(RgmError, ValueError):
    """Weights that must sum to one do not."""


class SizeLimitError(RgmError, ValueError):
    """An exact enumeration was requested beyond its size limit."""


class ParseError(RgmError, ValueError):
    """A data file could not be parsed."""


class ConfigError(RgmError, ValueError):
    """A run configuration is malformed."""


class ConvergenceError(RgmError, RuntimeError):
    """An iterative solver failed to reach its tolerance.

    The ``residual`` attribute carries the final convergence measure
    (marginal violation for Sinkhorn, gradient norm for the convex solver).
    """

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class DivergenceError(RgmError, RuntimeError):
    """Training produced a non-finite loss. ``iteration`` records where."""

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration
