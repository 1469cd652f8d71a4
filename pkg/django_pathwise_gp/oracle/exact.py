import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import cho_solve, lapack, solve_triangular

from django_pathwise_gp.constants.types import Array, Moments
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import CholeskyError, ConfigurationError, DataError
from django_pathwise_gp.kernels.spec import KernelSpec, gram
from django_pathwise_gp.settings.conf import config

logger = logging.getLogger(__name__)


def _factor(matrix: Array) -> Tuple[Array, int, float]:
    factor, info = lapack.dpotrf(matrix, lower=1, clean=1)
    if info == 0:
        return factor, -1, 0.0
    if info < 0:
        raise CholeskyError(f"dpotrf rejected argument {-info}.", -1, math.nan)
    pivot = info - 1
    return factor, pivot, float(factor[pivot, pivot])


def cholesky_with_jitter(
    matrix: Array, signal_variance: float, jitter: Optional[float] = None
) -> Tuple[Array, float]:
    """Lower Cholesky factor of ``matrix``, retrying once with
    ``jitter * signal_variance`` added to the diagonal.

    Returns:
        Tuple[np.ndarray, float]: The factor and the jitter that was added
        (0.0 when the first attempt succeeded).

    Raises:
        CholeskyError: If the jittered retry fails as well; it carries the
            index and value of the failing pivot.

    """
    factor, pivot, value = _factor(matrix)
    if pivot < 0:
        return factor, 0.0

    added = (config.jitter if jitter is None else jitter) * signal_variance
    logger.warning(
        "Cholesky failed at pivot %d (value %.3e); retrying with jitter %.3e",
        pivot,
        value,
        added,
    )
    jittered = matrix + added * np.eye(matrix.shape[0])
    factor, pivot, value = _factor(jittered)
    if pivot >= 0:
        raise CholeskyError(
            f"K + Σ is not numerically positive definite: pivot {pivot} "
            f"has value {value:.3e} even after adding jitter {added:.3e}.",
            pivot,
            value,
        )
    return factor, added


def _check_cap(num_points: int, max_points: Optional[int]) -> None:
    cap = config.oracle_max_points if max_points is None else max_points
    if num_points > cap:
        raise ConfigurationError(
            f"The exact oracle is limited to {cap} points, got {num_points}."
        )


@dataclass(frozen=True)
class ExactPosterior:
    """Dense GP posterior conditioned on a training set.

    Attributes:
        spec (KernelSpec): Kernel and noise.
        inputs (np.ndarray): Training inputs x (N×d).
        targets (np.ndarray): Training targets y.
        cholesky (np.ndarray): Lower factor L with L Lᵀ = K_xx + σ²I (+ jitter).
        weights (np.ndarray): v* = (K_xx + σ²I)⁻¹ y.
        jitter (float): Diagonal jitter that was needed, 0.0 if none.

    """

    spec: KernelSpec
    inputs: Array
    targets: Array
    cholesky: Array
    weights: Array
    jitter: float = 0.0

    @property
    def num_points(self) -> int:
        return int(self.inputs.shape[0])

    def solve(self, rhs: Array) -> Array:
        """Apply (K_xx + σ²I)⁻¹ to a vector or to the columns of a matrix."""
        return cho_solve((self.cholesky, True), rhs, check_finite=False)

    @property
    def log_marginal_likelihood(self) -> float:
        return float(
            -0.5 * self.targets @ self.weights
            - np.sum(np.log(np.diag(self.cholesky)))
            - 0.5 * self.num_points * math.log(2.0 * math.pi)
        )


def fit_exact(
    spec: KernelSpec, data: Dataset, max_points: Optional[int] = None
) -> ExactPosterior:
    """Factorize K_xx + σ²I and solve for the exact representer weights.

    Args:
        spec (KernelSpec): Kernel and noise variance.
        data (Dataset): Training data, at most ``max_points`` rows.
        max_points (Optional[int]): Size cap; defaults to the configured
            ``ORACLE_MAX_POINTS``.

    Returns:
        ExactPosterior: The fitted posterior.

    Raises:
        DataError: If the dataset is empty.
        ConfigurationError: If the size cap is exceeded.
        CholeskyError: If K_xx + σ²I cannot be factorized.

    """
    if data.num_points == 0:
        raise DataError("Cannot condition on an empty dataset.")
    _check_cap(data.num_points, max_points)

    system = gram(spec, data.inputs, data.inputs)
    system[np.diag_indices_from(system)] += spec.noise_variance
    factor, jitter = cholesky_with_jitter(system, spec.signal_variance)
    weights = cho_solve((factor, True), data.targets, check_finite=False)
    return ExactPosterior(spec, data.inputs, data.targets, factor, weights, jitter)


def posterior_moments(post: ExactPosterior, Xstar: Array) -> Moments:
    """Posterior mean and marginal variance at the query points.

    Variances are clipped below at zero.
    """
    cross = gram(post.spec, post.inputs, Xstar)
    mean = cross.T @ post.weights
    whitened = solve_triangular(post.cholesky, cross, lower=True, check_finite=False)
    variance = post.spec.signal_variance - np.sum(whitened**2, axis=0)
    return mean, np.maximum(variance, 0.0)


def posterior_covariance(post: ExactPosterior, Xstar: Array) -> Array:
    cross = gram(post.spec, post.inputs, Xstar)
    whitened = solve_triangular(post.cholesky, cross, lower=True, check_finite=False)
    return gram(post.spec, Xstar, Xstar) - whitened.T @ whitened


def log_marginal_likelihood(
    spec: KernelSpec, data: Dataset, max_points: Optional[int] = None
) -> float:
    """−½ yᵀ(K+σ²I)⁻¹y − ½ log det(K+σ²I) − (N/2) log 2π."""
    return fit_exact(spec, data, max_points).log_marginal_likelihood


def exact_sample_weights(
    post: ExactPosterior, prior_values: Array, noise: Array
) -> Array:
    """Representer weights of pathwise samples, solved exactly.

    Args:
        post (ExactPosterior): Fitted posterior.
        prior_values (np.ndarray): Prior draws at the training inputs, shape
            (S, N) or (N,).
        noise (np.ndarray): Observation-noise draws ε ~ N(0, σ²I), same shape.

    Returns:
        np.ndarray: α_s = (K_xx + σ²I)⁻¹ (f_s(x) + ε_s), same shape as the input.

    """
    rhs = np.asarray(prior_values, dtype=np.float64) + np.asarray(noise)
    if rhs.shape[-1] != post.num_points:
        raise DataError(
            f"prior values have {rhs.shape[-1]} entries per sample; "
            f"the posterior has {post.num_points} training points."
        )
    if rhs.ndim == 1:
        return post.solve(rhs)
    return post.solve(rhs.T).T
