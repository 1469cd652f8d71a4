import threading

import numpy as np

from django_pathwise_gp.constants.streams import STREAM_THOMPSON
from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.features import (
    PriorFunctionDraw,
    sample_feature_map,
    sample_prior,
)
from django_pathwise_gp.kernels.spec import KernelSpec
from django_pathwise_gp.utils.random import derive_seed


class TargetFunction:
    """A fixed prior function draw g used as the optimization target.

    Calls are counted per evaluated point so that a run's budget can be
    audited; gradients are analytic and not counted.
    """

    def __init__(self, draw: PriorFunctionDraw) -> None:
        self.draw = draw
        self.evaluations = 0
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self.draw.feature_map.dim

    def __call__(self, X: Array) -> Array:
        values = self.draw(X)
        with self._lock:
            self.evaluations += int(np.atleast_1d(values).shape[0])
        return values

    def gradient(self, X: Array) -> Array:
        return self.draw.gradient(X)


def draw_target(d: int, spec: KernelSpec, L: int, seed: int) -> TargetFunction:
    """Draw g(·) = θᵀΦ(·) from the approximate GP prior of ``spec``.

    Raises:
        ConfigurationError: If ``spec`` does not have ``d`` lengthscales.

    """
    if spec.dim != d:
        raise ConfigurationError(
            f"kernel has {spec.dim} lengthscales for a {d}-dimensional target."
        )
    feature_map = sample_feature_map(spec, L, derive_seed(seed, STREAM_THOMPSON, 0))
    return TargetFunction(
        sample_prior(feature_map, derive_seed(seed, STREAM_THOMPSON, 1))
    )
