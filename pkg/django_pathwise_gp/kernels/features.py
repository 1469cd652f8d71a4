import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from django_pathwise_gp.constants.types import Array, Seed
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelFamily, KernelSpec

TWO_PI = 2.0 * math.pi


def draw_frequencies(
    spec: KernelSpec, num_pairs: int, rng: np.random.Generator
) -> Array:
    """Draw frequencies from the kernel's normalized spectral measure.

    Frequencies are expressed in cycles (the ``cos(2π⟨ω, x⟩)`` convention):
    angular-frequency samples divided by 2π. Squared exponential uses a
    Gaussian; Matérn-3/2 a multivariate Student-t with 3 degrees of freedom,
    i.e. ``g·sqrt(3/χ²₃)`` with one χ² draw per frequency vector.

    Returns:
        np.ndarray: Array of shape (num_pairs, d).

    """
    gaussian = rng.standard_normal((num_pairs, spec.dim))
    if spec.family is KernelFamily.MATERN32:
        chi2 = rng.chisquare(3.0, size=(num_pairs, 1))
        gaussian = gaussian * np.sqrt(3.0 / chi2)
    return gaussian / (TWO_PI * spec.lengthscale_array)


@dataclass(frozen=True)
class FourierFeatureMap:
    """Random Fourier feature map Φ : R^d → R^L.

    Features come in cosine/sine pairs sharing one frequency, each scaled by
    ``sqrt(2σ_f²/L)``, so that Φ(x)·Φ(x) = σ_f² for every x.

    Attributes:
        frequencies (np.ndarray): (L/2)×d frequency matrix.
        signal_variance (float): σ_f², re-introduced as a feature scale.
        seed (Optional[int]): Seed the frequencies were drawn from, if any.

    """

    frequencies: Array
    signal_variance: float
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        frequencies = np.array(self.frequencies, dtype=np.float64, copy=True)
        if frequencies.ndim != 2 or frequencies.shape[0] < 1:
            raise ConfigurationError(
                "frequencies must be a non-empty matrix, "
                f"got shape {frequencies.shape}."
            )
        frequencies.setflags(write=False)
        object.__setattr__(self, "frequencies", frequencies)

    @property
    def num_features(self) -> int:
        return 2 * int(self.frequencies.shape[0])

    @property
    def dim(self) -> int:
        return int(self.frequencies.shape[1])

    @property
    def scale(self) -> float:
        return math.sqrt(2.0 * self.signal_variance / self.num_features)

    def phases(self, X: Array) -> Array:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.dim:
            raise ConfigurationError(
                f"inputs have {X.shape[1]} columns; the feature map expects {self.dim}."
            )
        return TWO_PI * (X @ self.frequencies.T)


def sample_feature_map(spec: KernelSpec, L: int, seed: Seed) -> FourierFeatureMap:
    """Draw a feature map with ``L`` features (``L/2`` frequencies).

    Raises:
        ConfigurationError: If ``L`` is odd or smaller than 2.

    """
    if L < 2 or L % 2:
        raise ConfigurationError(f"L must be an even integer >= 2, got {L}.")
    rng = np.random.default_rng(seed)
    frequencies = draw_frequencies(spec, L // 2, rng)
    return FourierFeatureMap(
        frequencies, spec.signal_variance, seed if isinstance(seed, int) else None
    )


def feature_eval(feature_map: FourierFeatureMap, X: Array) -> Array:
    """Evaluate Φ on every row of ``X``; returns an N×L matrix whose first
    L/2 columns are cosines and last L/2 the matching sines."""
    phases = feature_map.phases(X)
    return feature_map.scale * np.hstack([np.cos(phases), np.sin(phases)])


@dataclass(frozen=True)
class PriorFunctionDraw:
    """An approximate prior function f̃(·) = θᵀΦ(·)."""

    weights: Array
    feature_map: FourierFeatureMap

    def __post_init__(self) -> None:
        weights = np.array(self.weights, dtype=np.float64, copy=True).ravel()
        if weights.shape[0] != self.feature_map.num_features:
            raise ConfigurationError(
                f"{weights.shape[0]} weights for "
                f"{self.feature_map.num_features} features."
            )
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def __call__(self, X: Array) -> Array:
        return feature_eval(self.feature_map, X) @ self.weights

    def gradient(self, X: Array) -> Array:
        """Analytic input gradient of f̃ at every row of ``X``, shape (n, d)."""
        phases = self.feature_map.phases(X)
        half = self.feature_map.num_features // 2
        theta_cos, theta_sin = self.weights[:half], self.weights[half:]
        coefficient = -np.sin(phases) * theta_cos + np.cos(phases) * theta_sin
        scale = TWO_PI * self.feature_map.scale
        return scale * (coefficient @ self.feature_map.frequencies)


def sample_prior(feature_map: FourierFeatureMap, seed: Seed) -> PriorFunctionDraw:
    rng = np.random.default_rng(seed)
    return PriorFunctionDraw(rng.standard_normal(feature_map.num_features), feature_map)
