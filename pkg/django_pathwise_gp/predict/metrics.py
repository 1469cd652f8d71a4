import math
from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import ConfigurationError, DataError
from django_pathwise_gp.oracle.exact import ExactPosterior, posterior_moments
from django_pathwise_gp.predict.ensemble import PosteriorEnsemble, predictive_moments

Scalar = Union[float, Array]


@dataclass(frozen=True)
class Metrics:
    rmse: float
    nll: float

    def to_dict(self) -> Dict[str, Any]:
        return {"rmse": self.rmse, "nll": self.nll}


def metrics_from_moments(
    mean: Array, variance: Array, targets: Array, noise_variance: float
) -> Metrics:
    """RMSE of ``mean`` and the mean Gaussian negative log-likelihood of the
    targets under N(mean, variance + σ²)."""
    mean = np.asarray(mean, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if mean.shape != targets.shape:
        raise DataError(
            f"{mean.shape[0]} predictions for {targets.shape[0]} test targets."
        )
    total = np.asarray(variance, dtype=np.float64) + noise_variance
    squared = (targets - mean) ** 2
    nll = 0.5 * np.log(2.0 * math.pi * total) + squared / (2.0 * total)
    return Metrics(rmse=float(np.sqrt(np.mean(squared))), nll=float(np.mean(nll)))


def metrics(ens: PosteriorEnsemble, test: Dataset) -> Metrics:
    mean, variance = predictive_moments(ens, test.inputs)
    return metrics_from_moments(mean, variance, test.targets, ens.spec.noise_variance)


def exact_metrics(post: ExactPosterior, test: Dataset) -> Metrics:
    mean, variance = posterior_moments(post, test.inputs)
    return metrics_from_moments(mean, variance, test.targets, post.spec.noise_variance)


def w2_gaussian(mu1: Scalar, sd1: Scalar, mu2: Scalar, sd2: Scalar) -> Scalar:
    """2-Wasserstein distance between one-dimensional Gaussians,
    √((μ1 − μ2)² + (sd1 − sd2)²). Broadcasts over arrays.

    Raises:
        ConfigurationError: If a standard deviation is negative.

    """
    if np.any(np.asarray(sd1) < 0) or np.any(np.asarray(sd2) < 0):
        raise ConfigurationError("Standard deviations must be non-negative.")
    distance = np.hypot(np.subtract(mu1, mu2), np.subtract(sd1, sd2))
    return float(distance) if np.ndim(distance) == 0 else distance


def w2_profile(ens: PosteriorEnsemble, post: ExactPosterior, Xstar: Array) -> Array:
    """W2 between the ensemble's and the exact posterior's marginals at every
    query point."""
    mean, variance = predictive_moments(ens, Xstar)
    exact_mean, exact_variance = posterior_moments(post, Xstar)
    return w2_gaussian(mean, np.sqrt(variance), exact_mean, np.sqrt(exact_variance))


def paired_w2_profile(
    ens: PosteriorEnsemble, reference: PosteriorEnsemble, Xstar: Array
) -> Array:
    """W2 between the marginals of two ensembles at every query point.

    With a reference assembled from the same sample slots (for instance by
    :func:`~django_pathwise_gp.predict.ensemble.exact_models`), both
    ensembles share their prior draws, so the Monte Carlo error of the sample
    variances cancels and only the solver error remains. Far from the data
    the distance therefore vanishes instead of settling at the Monte Carlo
    floor of order σ_f/√(2S).

    Raises:
        ConfigurationError: If the ensembles hold different numbers of samples.

    """
    if ens.num_samples != reference.num_samples:
        raise ConfigurationError(
            f"Cannot pair {ens.num_samples} samples with "
            f"{reference.num_samples} reference samples."
        )
    mean, variance = predictive_moments(ens, Xstar)
    ref_mean, ref_variance = predictive_moments(reference, Xstar)
    return w2_gaussian(mean, np.sqrt(variance), ref_mean, np.sqrt(ref_variance))
