from typing import Optional


class PathwiseGPError(Exception):
    """Base class for every error raised by the library."""


class DataError(PathwiseGPError, ValueError):
    """Invalid or unreadable data: missing files, unparseable cells, shape or
    finiteness violations."""


class ConfigurationError(PathwiseGPError, ValueError):
    """Invalid parameters passed to an operation (odd feature counts,
    fractions outside their range, unstable learning rates, ...)."""


class NumericalError(PathwiseGPError, ArithmeticError):
    """A numerical routine broke down."""


class CholeskyError(NumericalError):
    """Cholesky factorization failed, even after the jitter retry.

    Attributes:
        pivot_index (int): Zero-based index of the first non-positive pivot.
        pivot_value (float): Value of that pivot.

    """

    def __init__(self, message: str, pivot_index: int, pivot_value: float) -> None:
        super().__init__(message)
        self.pivot_index = pivot_index
        self.pivot_value = pivot_value


class DivergenceError(NumericalError):
    """SGD weights exceeded the divergence threshold or became non-finite."""

    def __init__(self, message: str, step: int, weight_norm: float) -> None:
        super().__init__(message)
        self.step = step
        self.weight_norm = weight_norm


class EigensolverError(NumericalError):
    """The symmetric eigensolver failed or a requested eigenpair is unusable."""


class SearchError(NumericalError):
    """Hyperparameter search found no point with a finite marginal
    likelihood."""


class ConvergenceError(NumericalError):
    """An iterative solver produced non-finite iterates."""

    def __init__(self, message: str, iteration: Optional[int] = None) -> None:
        super().__init__(message)
        self.iteration = iteration
