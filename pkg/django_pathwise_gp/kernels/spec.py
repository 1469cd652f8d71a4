import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Sequence, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.exceptions import ConfigurationError

SQRT3 = math.sqrt(3.0)


class KernelFamily(str, Enum):
    SQUARED_EXPONENTIAL = "squared_exponential"
    MATERN32 = "matern32"


@dataclass(frozen=True)
class KernelSpec:
    """A stationary kernel with its observation noise.

    Attributes:
        family (KernelFamily): Squared exponential or Matérn-3/2.
        signal_variance (float): σ_f², the value of k(x, x).
        lengthscales (Tuple[float, ...]): One positive lengthscale per input
            dimension.
        noise_variance (float): σ², the homoscedastic observation noise (Σ = σ²I).

    """

    family: KernelFamily
    signal_variance: float
    lengthscales: Tuple[float, ...]
    noise_variance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", KernelFamily(self.family))
        lengthscales = tuple(float(v) for v in np.atleast_1d(self.lengthscales))
        object.__setattr__(self, "lengthscales", lengthscales)
        object.__setattr__(self, "signal_variance", float(self.signal_variance))
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

        if not lengthscales:
            raise ConfigurationError("KernelSpec needs at least one lengthscale.")
        if not all(v > 0 and math.isfinite(v) for v in lengthscales):
            raise ConfigurationError(
                f"lengthscales must be positive, got {lengthscales}."
            )
        if not self.signal_variance > 0:
            raise ConfigurationError(
                f"signal_variance must be positive, got {self.signal_variance}."
            )
        if not self.noise_variance > 0:
            raise ConfigurationError(
                f"noise_variance must be positive, got {self.noise_variance}."
            )

    @property
    def dim(self) -> int:
        return len(self.lengthscales)

    @property
    def lengthscale_array(self) -> Array:
        return np.asarray(self.lengthscales, dtype=np.float64)

    def with_noise(self, noise_variance: float) -> "KernelSpec":
        return replace(self, noise_variance=noise_variance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.value,
            "signal_variance": self.signal_variance,
            "lengthscales": list(self.lengthscales),
            "noise_variance": self.noise_variance,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "KernelSpec":
        return cls(
            family=KernelFamily(data["family"]),
            signal_variance=data["signal_variance"],
            lengthscales=tuple(data["lengthscales"]),
            noise_variance=data["noise_variance"],
        )

    @classmethod
    def isotropic(
        cls,
        family: KernelFamily,
        dim: int,
        lengthscale: float,
        signal_variance: float = 1.0,
        noise_variance: float = 0.1,
    ) -> "KernelSpec":
        return cls(family, signal_variance, (lengthscale,) * dim, noise_variance)


def _as_matrix(spec: KernelSpec, points: Array, name: str) -> Array:
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        if points.shape[0] == spec.dim:
            points = points.reshape(1, -1)
        else:
            points = points.reshape(-1, 1)
    if points.ndim != 2 or points.shape[1] != spec.dim:
        raise ConfigurationError(
            f"{name} has shape {points.shape}; the kernel expects {spec.dim} columns."
        )
    return points


def _profile(spec: KernelSpec, sq_dist: Array) -> Array:
    if spec.family is KernelFamily.SQUARED_EXPONENTIAL:
        return spec.signal_variance * np.exp(-0.5 * sq_dist)
    r = np.sqrt(sq_dist)
    return spec.signal_variance * (1.0 + SQRT3 * r) * np.exp(-SQRT3 * r)


def gram(spec: KernelSpec, X: Array, X2: Array) -> Array:
    """Kernel matrix with entries k(X_i, X2_j).

    Args:
        spec (KernelSpec): The kernel.
        X (np.ndarray): First point set, shape (n, d).
        X2 (np.ndarray): Second point set, shape (m, d).

    Returns:
        np.ndarray: Matrix of shape (n, m).

    Raises:
        ConfigurationError: If a column count differs from the lengthscale count.

    """
    X = _as_matrix(spec, X, "X")
    X2 = _as_matrix(spec, X2, "X2")
    scale = spec.lengthscale_array
    sq_dist = cdist(X / scale, X2 / scale, metric="sqeuclidean")
    return _profile(spec, sq_dist)


def kernel_eval(spec: KernelSpec, x: Sequence[float], x2: Sequence[float]) -> float:
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    x2 = np.asarray(x2, dtype=np.float64).reshape(1, -1)
    return float(gram(spec, x, x2)[0, 0])


def kernel_diagonal(spec: KernelSpec, num_points: int) -> Array:
    return np.full(num_points, spec.signal_variance)


def gram_gradient(spec: KernelSpec, Xq: Array, Z: Array) -> Array:
    """Gradient of k(x, z_j) with respect to the query x.

    For the squared exponential, ∇_x k = −k · (x − z)/ℓ². For Matérn-3/2,
    ∇_x k = −3σ_f² exp(−√3 r) (x − z)/ℓ², which stays finite at r = 0.

    Returns:
        np.ndarray: Array of shape (n, m, d).

    """
    Xq = _as_matrix(spec, Xq, "Xq")
    Z = _as_matrix(spec, Z, "Z")
    scale_sq = spec.lengthscale_array**2
    diff = (Xq[:, None, :] - Z[None, :, :]) / scale_sq
    scale = spec.lengthscale_array
    sq_dist = cdist(Xq / scale, Z / scale, metric="sqeuclidean")
    if spec.family is KernelFamily.SQUARED_EXPONENTIAL:
        factor = -_profile(spec, sq_dist)
    else:
        factor = -3.0 * spec.signal_variance * np.exp(-SQRT3 * np.sqrt(sq_dist))
    return factor[:, :, None] * diff
