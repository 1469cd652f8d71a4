import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial import cKDTree

from django_pathwise_gp.constants.streams import STREAM_CENTROIDS
from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import (
    CholeskyError,
    ConfigurationError,
    DataError,
    SearchError,
)
from django_pathwise_gp.kernels.spec import KernelFamily, KernelSpec
from django_pathwise_gp.oracle.exact import log_marginal_likelihood
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.utils.random import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HyperparameterSearch:
    """Coordinate-wise bounded scalar search over log-hyperparameters.

    Each sweep visits σ_f², every lengthscale and σ² in turn and maximizes
    the exact log marginal likelihood along that coordinate inside its
    bounds, keeping a move only when it improves the likelihood.

    Attributes:
        family (KernelFamily): Kernel family being fitted.
        sweeps (int): Number of passes over all coordinates.
        signal_bounds (tuple): Bounds on σ_f².
        lengthscale_bounds (tuple): Bounds on every lengthscale.
        noise_bounds (tuple): Bounds on σ².
        tolerance (float): Absolute tolerance of each line search, in log units.

    """

    family: KernelFamily = KernelFamily.MATERN32
    sweeps: int = 3
    signal_bounds: tuple = (1e-3, 1e2)
    lengthscale_bounds: tuple = (1e-2, 1e2)
    noise_bounds: tuple = (1e-6, 1e1)
    tolerance: float = 1e-3

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", KernelFamily(self.family))
        if self.sweeps < 1:
            raise ConfigurationError(f"sweeps must be at least 1, got {self.sweeps}.")
        for name in ("signal_bounds", "lengthscale_bounds", "noise_bounds"):
            low, high = getattr(self, name)
            if not 0 < low < high:
                raise ConfigurationError(f"{name} must satisfy 0 < low < high.")
        if not self.tolerance > 0:
            raise ConfigurationError("tolerance must be positive.")


@dataclass(frozen=True)
class HyperparameterFit:
    spec: KernelSpec
    log_marginal_likelihood: float
    initial_log_marginal_likelihood: float
    evaluations: int
    improved: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.spec.to_dict(),
            "log_marginal_likelihood": self.log_marginal_likelihood,
            "initial_log_marginal_likelihood": self.initial_log_marginal_likelihood,
            "evaluations": self.evaluations,
            "improved": self.improved,
        }


@dataclass(frozen=True)
class CentroidFit:
    """Averaged hyperparameters and the provenance of every centroid fit."""

    spec: KernelSpec
    centroid_indices: List[int]
    subset_size: int
    fits: List[HyperparameterFit] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kernel": self.spec.to_dict(),
            "averaging": "log",
            "subset_size": self.subset_size,
            "centroid_indices": list(self.centroid_indices),
            "per_centroid": [fit.to_dict() for fit in self.fits],
        }


def _pack(spec: KernelSpec) -> Array:
    return np.log(
        np.concatenate(
            [[spec.signal_variance], spec.lengthscale_array, [spec.noise_variance]]
        )
    )


def _unpack(family: KernelFamily, theta: Array) -> KernelSpec:
    values = np.exp(theta)
    return KernelSpec(family, values[0], tuple(values[1:-1]), values[-1])


def _initial_spec(data: Dataset, family: KernelFamily) -> KernelSpec:
    target_var = max(float(np.var(data.targets)), 1e-3)
    spread = np.std(data.inputs, axis=0)
    lengthscales = tuple(float(s) if s > 0 else 1.0 for s in spread)
    return KernelSpec(family, target_var, lengthscales, 0.1 * target_var)


def fit_hyperparameters(
    data: Dataset,
    search: Optional[HyperparameterSearch] = None,
    initial: Optional[KernelSpec] = None,
) -> HyperparameterFit:
    """Maximize the exact log marginal likelihood over (σ_f², ℓ, σ²).

    Raises:
        SearchError: If no evaluated point has a finite likelihood.

    """
    search = search or HyperparameterSearch()
    if data.num_points < 2:
        raise DataError("Hyperparameter search needs at least 2 points.")
    if data.num_points > config.oracle_max_points:
        raise ConfigurationError(
            f"Exact marginal likelihood is limited to {config.oracle_max_points} "
            f"points, got {data.num_points}; use the centroid procedure instead."
        )
    start = initial or _initial_spec(data, search.family)
    if start.dim != data.dim:
        raise ConfigurationError(
            f"initial kernel has {start.dim} lengthscales for {data.dim} input columns."
        )

    bounds = np.log(
        [search.signal_bounds]
        + [search.lengthscale_bounds] * data.dim
        + [search.noise_bounds]
    )
    evaluations = 0

    def objective(theta: Array) -> float:
        nonlocal evaluations
        evaluations += 1
        try:
            value = log_marginal_likelihood(_unpack(search.family, theta), data)
        except (CholeskyError, ConfigurationError):
            return math.inf
        return -value if math.isfinite(value) else math.inf

    theta = np.clip(_pack(start), bounds[:, 0], bounds[:, 1])
    best = objective(theta)
    initial_value = best
    for _ in range(search.sweeps):
        for j in range(theta.shape[0]):

            def along(t: float, j: int = j) -> float:
                trial = theta.copy()
                trial[j] = t
                return objective(trial)

            result = minimize_scalar(
                along,
                bounds=tuple(bounds[j]),
                method="bounded",
                options={"xatol": search.tolerance},
            )
            if result.fun < best:
                theta[j] = result.x
                best = float(result.fun)

    if not math.isfinite(best):
        raise SearchError(
            f"No finite marginal likelihood found in {evaluations} evaluations."
        )
    improved = best < initial_value
    if not improved:
        logger.warning(
            "Hyperparameter search found no point improving on the start "
            "(log marginal likelihood %.6g)",
            -best,
        )
    return HyperparameterFit(
        spec=_unpack(search.family, theta),
        log_marginal_likelihood=-best,
        initial_log_marginal_likelihood=-initial_value,
        evaluations=evaluations,
        improved=improved,
    )


def fit_hyperparameters_centroids(
    data: Dataset,
    num_centroids: int,
    subset_size: int,
    search: Optional[HyperparameterSearch] = None,
    seed: int = 0,
    threads: Optional[int] = None,
) -> CentroidFit:
    """Fit hyperparameters on the neighbourhoods of random centroids and
    average them.

    Centroids are drawn uniformly without replacement from the training
    points; each one is fitted on its ``subset_size`` nearest points
    (Euclidean distance). The per-centroid optima are averaged in log space.

    Raises:
        ConfigurationError: If ``subset_size`` exceeds N or counts are invalid.
        SearchError: Propagated from a centroid whose search failed.

    """
    search = search or HyperparameterSearch()
    if subset_size > data.num_points:
        raise ConfigurationError(
            f"subset_size {subset_size} exceeds the {data.num_points} available points."
        )
    if subset_size < 2 or not 1 <= num_centroids <= data.num_points:
        raise ConfigurationError(
            "num_centroids must lie in [1, N] and subset_size must be at least 2."
        )

    rng = make_rng(seed, STREAM_CENTROIDS)
    centroids = np.sort(rng.choice(data.num_points, size=num_centroids, replace=False))
    tree = cKDTree(data.inputs)

    def fit_one(centroid: int) -> HyperparameterFit:
        _, neighbours = tree.query(data.inputs[centroid], k=subset_size)
        subset = data.subset(np.sort(np.atleast_1d(neighbours)))
        return fit_hyperparameters(subset, search)

    with ThreadPoolExecutor(max_workers=threads or config.threads) as pool:
        fits = list(pool.map(fit_one, centroids.tolist()))

    average = np.mean([_pack(fit.spec) for fit in fits], axis=0)
    spec = _unpack(search.family, average)
    logger.info(
        "Averaged hyperparameters over %d centroids: %s", num_centroids, spec.to_dict()
    )
    return CentroidFit(spec, centroids.tolist(), subset_size, fits)
