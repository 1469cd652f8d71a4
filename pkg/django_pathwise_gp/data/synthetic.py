"""Built-in synthetic regression problems.

The 1D problems observe ``sin(2x) + cos(5x)`` under Gaussian noise and differ
only in where the inputs are placed: uniformly on an interval, densely around
the origin (infill asymptotics, ``x ~ N(0, 1)``), or on a regular grid with a
fixed spacing (large-domain asymptotics). ``gp_prior_dataset`` draws targets
from a random-feature approximation of a GP prior on the unit cube.
"""

import math
from typing import Callable, Dict

import numpy as np

from django_pathwise_gp.constants.streams import (
    STREAM_DATA,
    STREAM_FEATURES,
    STREAM_NOISE,
    STREAM_THETA,
)
from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.features import sample_feature_map, sample_prior
from django_pathwise_gp.kernels.spec import KernelSpec
from django_pathwise_gp.utils.random import derive_seed, make_rng

DEFAULT_NOISE_VARIANCE = 0.5


def regression_function(inputs: Array) -> Array:
    x = np.asarray(inputs, dtype=np.float64).reshape(len(inputs), -1)[:, 0]
    return np.sin(2.0 * x) + np.cos(5.0 * x)


def _check(num_points: int, noise_variance: float) -> None:
    if num_points < 1:
        raise ConfigurationError(f"num_points must be at least 1, got {num_points}.")
    if noise_variance < 0:
        raise ConfigurationError(
            f"noise_variance must be non-negative, got {noise_variance}."
        )


def _observe(inputs: Array, seed: int, noise_variance: float) -> Dataset:
    noise = make_rng(seed, STREAM_NOISE).standard_normal(inputs.shape[0])
    targets = regression_function(inputs) + math.sqrt(noise_variance) * noise
    return Dataset(inputs, targets, ("x",))


def sinusoid_dataset(
    num_points: int,
    seed: int,
    noise_variance: float = DEFAULT_NOISE_VARIANCE,
    low: float = -3.0,
    high: float = 3.0,
) -> Dataset:
    _check(num_points, noise_variance)
    if not high > low:
        raise ConfigurationError(f"empty input interval [{low}, {high}].")
    inputs = make_rng(seed, STREAM_DATA).uniform(low, high, size=(num_points, 1))
    return _observe(inputs, seed, noise_variance)


def infill_dataset(
    num_points: int, seed: int, noise_variance: float = DEFAULT_NOISE_VARIANCE
) -> Dataset:
    _check(num_points, noise_variance)
    inputs = make_rng(seed, STREAM_DATA).standard_normal((num_points, 1))
    return _observe(inputs, seed, noise_variance)


def grid_dataset(
    num_points: int,
    seed: int,
    noise_variance: float = DEFAULT_NOISE_VARIANCE,
    spacing: float = 0.01,
) -> Dataset:
    """Regular grid centred on the origin; the seed only drives the noise."""
    _check(num_points, noise_variance)
    if not spacing > 0:
        raise ConfigurationError(f"spacing must be positive, got {spacing}.")
    inputs = (np.arange(num_points) - (num_points - 1) / 2.0) * spacing
    return _observe(inputs.reshape(-1, 1), seed, noise_variance)


def gp_prior_dataset(
    spec: KernelSpec,
    num_points: int,
    seed: int,
    num_features: int = 2000,
) -> Dataset:
    """Inputs uniform on ``[0, 1]^d``; targets are one prior function draw
    plus ``N(0, spec.noise_variance)`` noise."""
    _check(num_points, spec.noise_variance)
    feature_map = sample_feature_map(
        spec, num_features, derive_seed(seed, STREAM_FEATURES)
    )
    prior = sample_prior(feature_map, derive_seed(seed, STREAM_THETA))
    inputs = make_rng(seed, STREAM_DATA).uniform(size=(num_points, spec.dim))
    noise = make_rng(seed, STREAM_NOISE).standard_normal(num_points)
    targets = prior(inputs) + math.sqrt(spec.noise_variance) * noise
    return Dataset(inputs, targets, tuple(f"x{i}" for i in range(spec.dim)))


GENERATORS: Dict[str, Callable[..., Dataset]] = {
    "sinusoid": sinusoid_dataset,
    "infill": infill_dataset,
    "grid": grid_dataset,
    "gp_prior": gp_prior_dataset,
}
