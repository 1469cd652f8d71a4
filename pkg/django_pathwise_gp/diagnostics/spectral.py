"""Eigen-analysis of K_xx and the per-direction error measures built on it.

Directions are numbered from 1 (largest eigenvalue) to N, matching the
``i`` column of the diagnostics tables. Learning rates ``eta`` here are the
step sizes of plain gradient descent on

    L(v) = (1/(2σ²)) Σ_i (y_i − K_{x_i x} v)² + ½ vᵀK_xx v,

whose stability condition is 0 < η < σ²/(λ₁(λ₁ + σ²)).
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, eigh

from django_pathwise_gp.constants.streams import STREAM_SGD
from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import (
    ConfigurationError,
    DataError,
    EigensolverError,
)
from django_pathwise_gp.kernels.spec import KernelSpec, gram
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.utils.random import make_rng

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralDecomposition:
    """K_xx = U Λ Uᵀ with eigenvalues sorted in descending order.

    Attributes:
        spec (KernelSpec): Kernel of K_xx.
        inputs (np.ndarray): Training inputs x.
        eigenvalues (np.ndarray): λ₁ ≥ … ≥ λ_N.
        eigenvectors (np.ndarray): Orthonormal columns u_i.
        gram_matrix (np.ndarray): K_xx itself.

    """

    spec: KernelSpec
    inputs: Array
    eigenvalues: Array
    eigenvectors: Array
    gram_matrix: Array

    @property
    def num_points(self) -> int:
        return int(self.eigenvalues.shape[0])

    @property
    def top_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    def project(self, vector: Array) -> Array:
        """Coefficients Uᵀ vector (or Uᵀ matrix for column stacks)."""
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape[0] != self.num_points:
            raise DataError(
                f"vector has {vector.shape[0]} entries; "
                f"the decomposition has {self.num_points} directions."
            )
        return self.eigenvectors.T @ vector


def decompose(
    spec: KernelSpec, data: Dataset, max_points: Optional[int] = None
) -> SpectralDecomposition:
    """Symmetric eigendecomposition of the training kernel matrix.

    Raises:
        ConfigurationError: If N exceeds the oracle size cap.
        EigensolverError: If the eigensolver fails.

    """
    cap = config.oracle_max_points if max_points is None else max_points
    if data.num_points > cap:
        raise ConfigurationError(
            f"Spectral diagnostics are limited to {cap} points, got {data.num_points}."
        )
    if data.num_points == 0:
        raise DataError("Cannot decompose the kernel matrix of an empty dataset.")

    K = gram(spec, data.inputs, data.inputs)
    try:
        values, vectors = eigh(K)
    except LinAlgError as error:
        raise EigensolverError(f"Symmetric eigensolver failed: {error}") from error

    order = np.argsort(values)[::-1]
    values, vectors = values[order], vectors[:, order]
    small = int(np.sum(values <= config.eigenvalue_floor * values[0]))
    if small:
        logger.warning(
            "%d of %d eigenvalues lie below the floor %.1e·λ₁",
            small,
            data.num_points,
            config.eigenvalue_floor,
        )
    return SpectralDecomposition(spec, data.inputs, values, vectors, K)


def _direction(dec: SpectralDecomposition, i: int) -> int:
    if not 1 <= i <= dec.num_points:
        raise ConfigurationError(
            f"direction {i} is outside 1..{dec.num_points}."
        )
    return i - 1


def spectral_basis_eval(dec: SpectralDecomposition, i: int, Xstar: Array) -> Array:
    """Evaluate u⁽ⁱ⁾(·) = Σ_j (U_ji/√λ_i) k(x_j, ·) at the query points.

    Raises:
        EigensolverError: If λ_i is below the eigenvalue floor.

    """
    column = _direction(dec, i)
    value = dec.eigenvalues[column]
    if value <= config.eigenvalue_floor * dec.top_eigenvalue:
        raise EigensolverError(
            f"λ_{i} = {value:.3e} is below the floor "
            f"{config.eigenvalue_floor:.1e}·λ₁; its basis function is unusable."
        )
    cross = gram(dec.spec, Xstar, dec.inputs)
    return cross @ dec.eigenvectors[:, column] / math.sqrt(value)


@dataclass(frozen=True)
class ProjectedErrors:
    """Per-direction errors between two representer weight vectors.

    Attributes:
        coefficients (np.ndarray): |u_iᵀ(v − v*)|.
        rkhs (np.ndarray): √λ_i |u_iᵀ(v − v*)|, the RKHS norm of the error
            projected onto u⁽ⁱ⁾.

    """

    coefficients: Array
    rkhs: Array

    @property
    def rkhs_total(self) -> float:
        """‖μ − μ*‖_{H_k} over all directions."""
        return float(np.sqrt(np.sum(self.rkhs**2)))


def _sqrt_eigenvalues(dec: SpectralDecomposition) -> Array:
    return np.sqrt(np.clip(dec.eigenvalues, 0.0, None))


def projected_errors(
    dec: SpectralDecomposition, v: Array, v_star: Array
) -> ProjectedErrors:
    v = np.asarray(v, dtype=np.float64)
    v_star = np.asarray(v_star, dtype=np.float64)
    if v.shape != v_star.shape:
        raise DataError(f"weight shapes differ: {v.shape} and {v_star.shape}.")
    coefficients = np.abs(dec.project(v - v_star))
    return ProjectedErrors(coefficients, _sqrt_eigenvalues(dec) * coefficients)


def rkhs_coordinates(dec: SpectralDecomposition, theta: Array) -> Array:
    """Λ^{1/2} Uᵀ θ; its Euclidean norm is the RKHS norm of Σ_j θ_j k(x_j, ·)."""
    coefficients = dec.project(theta)
    scale = _sqrt_eigenvalues(dec)
    if coefficients.ndim == 1:
        return scale * coefficients
    return scale[:, None] * coefficients


def interpolation_seminorm(
    dec: SpectralDecomposition, theta: Array, directions: Sequence[int]
) -> float:
    """√(θᵀ U Λ_I Uᵀ θ): the RKHS norm of θ's projection onto the span of the
    basis functions in ``directions``."""
    columns = [_direction(dec, i) for i in directions]
    coordinates = rkhs_coordinates(dec, theta)
    return float(np.sqrt(np.sum(coordinates[columns] ** 2)))


def check_stability(
    dec: SpectralDecomposition, eta: float, noise_variance: float
) -> None:
    top = dec.top_eigenvalue
    limit = noise_variance / (top * (top + noise_variance))
    if not 0 < eta < limit:
        raise ConfigurationError(
            f"learning rate {eta} violates the stability condition "
            f"0 < η < σ²/(λ₁(λ₁+σ²)) = {limit:.6g}."
        )


def sgd_error_bound(
    dec: SpectralDecomposition,
    t: int,
    eta: float,
    noise_variance: float,
    y_norm: float,
    G: float,
    delta: float,
) -> Array:
    """High-probability bound on the RKHS error of Polyak-averaged SGD in each
    spectral direction after ``t`` steps:

        (1/√(λ_i t)) (‖y‖/(ησ²) + G √(2ησ² log(N/δ)))

    Directions with λ_i ≤ 0 get an infinite bound.

    Raises:
        ConfigurationError: If η violates the stability condition, t < 1 or
            δ is outside (0, 1).

    """
    check_stability(dec, eta, noise_variance)
    if t < 1:
        raise ConfigurationError(f"t must be at least 1, got {t}.")
    if not 0 < delta < 1:
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta}.")
    constant = y_norm / (eta * noise_variance) + G * math.sqrt(
        2.0 * eta * noise_variance * math.log(dec.num_points / delta)
    )
    with np.errstate(divide="ignore"):
        scale = np.where(
            dec.eigenvalues > 0, 1.0 / np.sqrt(np.abs(dec.eigenvalues) * t), np.inf
        )
    return scale * constant


def coefficient_bound(
    dec: SpectralDecomposition,
    t: int,
    eta: float,
    noise_variance: float,
    y_norm: float,
    G: float,
    delta: float,
) -> Array:
    """The same bound for the weight coefficients |u_iᵀ(v* − v̄_t)|, i.e. the
    RKHS bound divided by √λ_i."""
    bound = sgd_error_bound(dec, t, eta, noise_variance, y_norm, G, delta)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(dec.eigenvalues > 0, bound / _sqrt_eigenvalues(dec), np.inf)


def _contraction(
    dec: SpectralDecomposition, eta: float, noise_variance: float
) -> Array:
    return eta / noise_variance * dec.eigenvalues * (dec.eigenvalues + noise_variance)


def noiseless_gd_error(
    dec: SpectralDecomposition, y: Array, eta: float, noise_variance: float, t: int
) -> Array:
    """Exact per-direction error (1 − β_i)^t |u_iᵀy|/(λ_i + σ²) of full-batch
    gradient descent after ``t`` steps from zero, with
    β_i = (η/σ²) λ_i (λ_i + σ²)."""
    check_stability(dec, eta, noise_variance)
    beta = _contraction(dec, eta, noise_variance)
    return (
        (1.0 - beta) ** t
        * np.abs(dec.project(y))
        / (dec.eigenvalues + noise_variance)
    )


def gradient_descent_weights(
    dec: SpectralDecomposition,
    y: Array,
    eta: float,
    noise_variance: float,
    t: int,
    initial: Optional[Array] = None,
) -> Array:
    """Run ``t`` steps of v ← v − (η/σ²)(K(K + σ²I)v − Ky) with dense
    matrix-vector products."""
    K = dec.gram_matrix
    y = np.asarray(y, dtype=np.float64)
    weights = np.zeros_like(y)
    if initial is not None:
        weights = np.array(initial, dtype=np.float64)
    Ky = K @ y
    for _ in range(t):
        Kv = K @ weights
        weights = weights - eta / noise_variance * (K @ Kv + noise_variance * Kv - Ky)
    return weights


def exact_weights(dec: SpectralDecomposition, y: Array, noise_variance: float) -> Array:
    """v* = (K + σ²I)⁻¹y through the eigenbasis."""
    coefficients = dec.project(y) / (dec.eigenvalues + noise_variance)
    return dec.eigenvectors @ coefficients


def simulate_noisy_polyak_sgd(
    dec: SpectralDecomposition,
    y: Array,
    eta: float,
    noise_variance: float,
    t: int,
    G: float,
    num_runs: int,
    seed: int = 0,
) -> Array:
    """Polyak-averaged gradient descent with injected gradient noise.

    Each step adds ζ ~ N(0, G²I) to the exact gradient of L; the average runs
    over iterates 1..t. The recursion is carried out in the eigenbasis, where
    it decouples per direction and isotropic noise stays isotropic.

    Returns:
        np.ndarray: Coefficient errors |u_iᵀ(v* − v̄_t)| of shape (num_runs, N).

    """
    check_stability(dec, eta, noise_variance)
    if t < 1 or num_runs < 1:
        raise ConfigurationError("t and num_runs must be at least 1.")
    projected_y = dec.project(y)
    target = projected_y / (dec.eigenvalues + noise_variance)
    decay = 1.0 - _contraction(dec, eta, noise_variance)
    drive = eta / noise_variance * dec.eigenvalues * projected_y

    rng = make_rng(seed, STREAM_SGD)
    coefficients = np.zeros((num_runs, dec.num_points))
    running = np.zeros_like(coefficients)
    for _ in range(t):
        noise = G * rng.standard_normal(coefficients.shape)
        coefficients = decay * coefficients + drive - eta * noise
        running += coefficients
    return np.abs(target - running / t)


def spectral_table(
    dec: SpectralDecomposition, measured: Array, bound: Array
) -> List[Dict[str, Any]]:
    """Rows (i, λ_i, measured_error, bound, ratio) for the diagnostics CSV."""
    rows = []
    triples = zip(dec.eigenvalues, measured, bound)
    for column, (value, error, limit) in enumerate(triples):
        ratio = float(error / limit) if np.isfinite(limit) and limit > 0 else 0.0
        rows.append(
            {
                "i": column + 1,
                "eigenvalue": float(value),
                "measured_error": float(error),
                "bound": float(limit),
                "ratio": ratio,
            }
        )
    return rows
