"""Quadratic objectives whose minimizers are GP representer weights.

Every estimator here returns the gradient of its objective exactly as
written, with the factor 2 and the 1/σ² data weighting:

* mean:            Σ_i (y_i − K_{x_i x} v)²/σ² + ‖v‖²_{K_xx}
* sample, shifted: Σ_i (f(x_i) − K_{x_i x} α)²/σ² + ‖α − δ‖²_{K_xx}
* inducing mean:   Σ_i (y_i − K_{x_i z} v)²/σ² + ‖v‖²_{K_zz}
* inducing sample: Σ_i (f(x_i) − K_{x_i z} α)²/σ² + ‖α‖²_{K_zz}
                   − 2αᵀK_zx δ

with δ = ε/σ². The data term is estimated from a minibatch drawn uniformly
with replacement and rescaled by N/D; the regularizer either uses the exact
kernel matrix (``feature_map=None``) or a fresh random Fourier feature map.
"""

from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import solve

from django_pathwise_gp.constants.streams import (
    STREAM_FEATURES,
    STREAM_NOISE,
    STREAM_THETA,
)
from django_pathwise_gp.constants.types import Array, Indices
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import ConfigurationError, DataError
from django_pathwise_gp.kernels.features import (
    FourierFeatureMap,
    PriorFunctionDraw,
    feature_eval,
    sample_feature_map,
    sample_prior,
)
from django_pathwise_gp.kernels.spec import KernelSpec, gram
from django_pathwise_gp.oracle.exact import cholesky_with_jitter
from django_pathwise_gp.utils.random import derive_seed, make_rng


@dataclass(frozen=True)
class SampleSlot:
    """One posterior sample under optimization.

    A slot pairs a prior function draw with its values f(x) at the training
    inputs and a fixed observation-noise draw ε ~ N(0, σ²I); δ = ε/σ² is the
    regularizer shift of the variance-reduced objective.
    """

    index: int
    seed: int
    prior: PriorFunctionDraw
    prior_values: Array
    noise: Array
    noise_variance: float

    @property
    def delta(self) -> Array:
        return self.noise / self.noise_variance

    @property
    def targets(self) -> Array:
        """Targets of the un-shifted objective, f(x) + ε."""
        return self.prior_values + self.noise

    @property
    def num_points(self) -> int:
        return int(self.prior_values.shape[0])

    def extend(self, inputs: Array) -> "SampleSlot":
        """Return the slot grown by new training inputs; the old prior values
        and noise are kept and fresh noise is drawn for the new rows."""
        dim = self.prior.feature_map.dim
        inputs = np.asarray(inputs, dtype=np.float64).reshape(-1, dim)
        rng = make_rng(self.seed, STREAM_NOISE, self.index, self.num_points)
        noise = np.sqrt(self.noise_variance) * rng.standard_normal(inputs.shape[0])
        return replace(
            self,
            prior_values=np.concatenate([self.prior_values, self.prior(inputs)]),
            noise=np.concatenate([self.noise, noise]),
        )


def make_sample_slot(
    spec: KernelSpec, inputs: Array, num_features: int, seed: int, index: int
) -> SampleSlot:
    """Create slot ``index`` of the run ``seed``.

    The feature map, the prior weights θ and the noise come from independent
    streams keyed by the slot index, so a slot is reproducible on its own.
    """
    feature_map = sample_feature_map(
        spec, num_features, derive_seed(seed, STREAM_FEATURES, index)
    )
    prior = sample_prior(feature_map, derive_seed(seed, STREAM_THETA, index))
    inputs = np.asarray(inputs, dtype=np.float64)
    noise_rng = make_rng(seed, STREAM_NOISE, index, 0)
    noise = np.sqrt(spec.noise_variance) * noise_rng.standard_normal(inputs.shape[0])
    return SampleSlot(index, seed, prior, prior(inputs), noise, spec.noise_variance)


def init_sample_slots(
    spec: KernelSpec, inputs: Array, num_samples: int, num_features: int, seed: int
) -> List[SampleSlot]:
    if num_samples < 1:
        raise ConfigurationError(f"num_samples must be at least 1, got {num_samples}.")
    return [
        make_sample_slot(spec, inputs, num_features, seed, index)
        for index in range(num_samples)
    ]


@dataclass(frozen=True)
class RepresenterModel:
    """Representer weights over a set of anchor points.

    Attributes:
        spec (KernelSpec): Kernel the weights refer to.
        anchors (np.ndarray): Training inputs x or inducing points z (M×d).
        mean_weights (Optional[np.ndarray]): Mean weights v, length M.
        sample_weights (Optional[np.ndarray]): Sample weights α, shape (S, M).
        slots (Tuple[SampleSlot, ...]): The slot of every row of ``sample_weights``.

    """

    spec: KernelSpec
    anchors: Array
    mean_weights: Optional[Array] = None
    sample_weights: Optional[Array] = None
    slots: Tuple[SampleSlot, ...] = ()

    def __post_init__(self) -> None:
        anchors = np.asarray(self.anchors, dtype=np.float64)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "slots", tuple(self.slots))
        if self.mean_weights is not None:
            mean = np.asarray(self.mean_weights, dtype=np.float64)
            if mean.shape != (self.num_anchors,):
                raise DataError(
                    f"mean weights have shape {mean.shape}; "
                    f"expected ({self.num_anchors},)."
                )
            object.__setattr__(self, "mean_weights", mean)
        if self.sample_weights is not None:
            samples = np.atleast_2d(np.asarray(self.sample_weights, dtype=np.float64))
            if samples.shape[1] != self.num_anchors:
                raise DataError(
                    f"sample weights have {samples.shape[1]} columns for "
                    f"{self.num_anchors} anchors."
                )
            if samples.shape[0] != len(self.slots):
                raise DataError(
                    f"{samples.shape[0]} sample weight vectors for "
                    f"{len(self.slots)} slots."
                )
            object.__setattr__(self, "sample_weights", samples)

    @property
    def num_anchors(self) -> int:
        return int(self.anchors.shape[0])

    @property
    def num_samples(self) -> int:
        return len(self.slots)


def _check_batch(batch: Indices, num_points: int) -> Indices:
    batch = np.asarray(batch, dtype=np.intp).ravel()
    if batch.size == 0:
        raise ConfigurationError("Gradient estimates need a non-empty batch.")
    if batch.min() < 0 or batch.max() >= num_points:
        raise ConfigurationError(f"batch indices must lie in [0, {num_points}).")
    return batch


def _check_slot(slot: Optional[SampleSlot], num_points: int) -> SampleSlot:
    if slot is None or slot.num_points != num_points:
        raise ConfigurationError(
            "The sample slot is not initialised for this dataset; create it with "
            "make_sample_slot on the training inputs."
        )
    return slot


def data_term_gradient(
    kernel_rows: Array,
    weights: Array,
    targets: Array,
    num_points: int,
    noise_variance: float,
) -> Array:
    """(N/D)(2/σ²) K_Bᵀ (K_B w − t_B) for a D-row block K_B of the kernel."""
    residual = kernel_rows @ weights - targets
    scale = 2.0 * num_points / (kernel_rows.shape[0] * noise_variance)
    return scale * (kernel_rows.T @ residual)


def regularizer_gradient(
    points: Array,
    weights: Array,
    spec: KernelSpec,
    feature_map: Optional[FourierFeatureMap] = None,
) -> Array:
    """2 K w over ``points``, or its unbiased estimate 2 Φ Φᵀ w when a feature
    map is given."""
    if feature_map is None:
        return 2.0 * gram(spec, points, points) @ weights
    features = feature_eval(feature_map, points)
    return 2.0 * (features @ (features.T @ weights))


def mean_grad_estimate(
    weights: Array,
    data: Dataset,
    spec: KernelSpec,
    batch: Indices,
    feature_map: Optional[FourierFeatureMap] = None,
) -> Array:
    """Minibatch estimate of the mean objective's gradient.

    Args:
        weights (np.ndarray): Current mean weights v (length N).
        data (Dataset): Training data.
        spec (KernelSpec): Kernel and noise variance.
        batch (np.ndarray): Row indices of the minibatch (with repetition).
        feature_map (Optional[FourierFeatureMap]): Fresh features for the
            regularizer; ``None`` uses the exact K_xx v.

    Returns:
        np.ndarray: Gradient estimate of length N.

    Raises:
        ConfigurationError: If the batch is empty or out of range.

    """
    batch = _check_batch(batch, data.num_points)
    rows = gram(spec, data.inputs[batch], data.inputs)
    grad = data_term_gradient(
        rows, weights, data.targets[batch], data.num_points, spec.noise_variance
    )
    return grad + regularizer_gradient(data.inputs, weights, spec, feature_map)


def sample_grad_estimate(
    weights: Array,
    slot: SampleSlot,
    data: Dataset,
    spec: KernelSpec,
    batch: Indices,
    feature_map: Optional[FourierFeatureMap] = None,
) -> Array:
    """Minibatch estimate of the shifted sampling objective's gradient; the
    regularizer is 2ΦΦᵀ(α − δ), or 2K(α − δ) without ``feature_map``."""
    slot = _check_slot(slot, data.num_points)
    batch = _check_batch(batch, data.num_points)
    rows = gram(spec, data.inputs[batch], data.inputs)
    grad = data_term_gradient(
        rows,
        weights,
        slot.prior_values[batch],
        data.num_points,
        spec.noise_variance,
    )
    shifted = weights - slot.delta
    return grad + regularizer_gradient(data.inputs, shifted, spec, feature_map)


def inducing_mean_grad_estimate(
    weights: Array,
    anchors: Array,
    data: Dataset,
    spec: KernelSpec,
    batch: Indices,
    feature_map: Optional[FourierFeatureMap] = None,
) -> Array:
    """Minibatch estimate of the inducing mean objective's gradient (length M);
    the data term only touches the D×M block K_Bz."""
    batch = _check_batch(batch, data.num_points)
    rows = gram(spec, data.inputs[batch], anchors)
    grad = data_term_gradient(
        rows, weights, data.targets[batch], data.num_points, spec.noise_variance
    )
    return grad + regularizer_gradient(anchors, weights, spec, feature_map)


def inducing_shift(
    slot: SampleSlot, anchors: Array, data: Dataset, spec: KernelSpec
) -> Array:
    """K_zx δ, the fixed linear term of the shifted inducing sampling objective."""
    return gram(spec, anchors, data.inputs) @ slot.delta


def inducing_sample_grad_estimate(
    weights: Array,
    anchors: Array,
    slot: SampleSlot,
    data: Dataset,
    spec: KernelSpec,
    batch: Indices,
    feature_map: Optional[FourierFeatureMap] = None,
    shift: Optional[Array] = None,
) -> Array:
    """Minibatch estimate of the shifted inducing sampling objective's
    gradient: data term on f(x), regularizer 2K_zz α − 2K_zx δ.

    ``shift`` may carry a precomputed K_zx δ (see :func:`inducing_shift`).
    """
    slot = _check_slot(slot, data.num_points)
    batch = _check_batch(batch, data.num_points)
    rows = gram(spec, data.inputs[batch], anchors)
    grad = data_term_gradient(
        rows,
        weights,
        slot.prior_values[batch],
        data.num_points,
        spec.noise_variance,
    )
    if shift is None:
        shift = inducing_shift(slot, anchors, data, spec)
    regularizer = regularizer_gradient(anchors, weights, spec, feature_map)
    return grad + regularizer - 2.0 * shift


# Dense gradients and closed-form minimizers


def dense_mean_gradient(
    weights: Array, K: Array, targets: Array, noise_variance: float
) -> Array:
    """2(K Σ⁻¹(K v − y) + K v)."""
    return 2.0 * (K @ (K @ weights - targets) / noise_variance + K @ weights)


def dense_sample_gradient(
    weights: Array, K: Array, slot: SampleSlot, shifted: bool = True
) -> Array:
    """Exact gradient of the shifted (default) or un-shifted sampling objective."""
    if shifted:
        residual = K @ weights - slot.prior_values
        return 2.0 * (K @ residual / slot.noise_variance + K @ (weights - slot.delta))
    return dense_mean_gradient(weights, K, slot.targets, slot.noise_variance)


def dense_inducing_mean_gradient(
    weights: Array, K_xz: Array, K_zz: Array, targets: Array, noise_variance: float
) -> Array:
    """2(K_zx Σ⁻¹(K_xz v − y) + K_zz v)."""
    return 2.0 * (K_xz.T @ (K_xz @ weights - targets) / noise_variance + K_zz @ weights)


def dense_inducing_sample_gradient(
    weights: Array, K_xz: Array, K_zz: Array, slot: SampleSlot, shifted: bool = True
) -> Array:
    if shifted:
        residual = K_xz @ weights - slot.prior_values
        return 2.0 * (
            K_xz.T @ residual / slot.noise_variance
            + K_zz @ weights
            - K_xz.T @ slot.delta
        )
    return dense_inducing_mean_gradient(
        weights, K_xz, K_zz, slot.targets, slot.noise_variance
    )


def representer_closed_form(K: Array, targets: Array, noise_variance: float) -> Array:
    """(K + σ²I)⁻¹ t for one target vector or the rows of a target matrix."""
    system = K + noise_variance * np.eye(K.shape[0])
    return solve(system, np.asarray(targets).T, assume_a="pos").T


def inducing_closed_form(
    K_xz: Array, K_zz: Array, targets: Array, noise_variance: float
) -> Array:
    """(K_zx Σ⁻¹ K_xz + K_zz)⁻¹ K_zx Σ⁻¹ t, the ridge-regression solution of
    the inducing objectives."""
    system = K_xz.T @ K_xz / noise_variance + K_zz
    rhs = K_xz.T @ np.asarray(targets).T / noise_variance
    return solve(system, rhs, assume_a="sym").T


def sampling_gradient_covariances(
    spec: KernelSpec,
    inputs: Array,
    weights: Optional[Array] = None,
    num_draws: int = 20_000,
    seed: int = 0,
) -> Tuple[Array, Array]:
    """Empirical covariances of single-point (D=1) data-term gradients of the
    un-shifted and the shifted sampling objectives.

    Each draw samples a fresh prior function f(x) ~ N(0, K_xx), noise
    ε ~ N(0, σ²I) and a row i ~ U{1..N}; the regularizer is omitted because
    both objectives estimate it identically.

    Returns:
        Tuple[np.ndarray, np.ndarray]: (covariance of the un-shifted estimator,
        covariance of the shifted estimator), both N×N.

    """
    inputs = np.asarray(inputs, dtype=np.float64)
    num_points = inputs.shape[0]
    weights = np.zeros(num_points) if weights is None else np.asarray(weights)
    K = gram(spec, inputs, inputs)
    factor, _ = cholesky_with_jitter(
        K + 1e-10 * spec.signal_variance * np.eye(num_points), spec.signal_variance
    )

    rng = make_rng(seed, STREAM_NOISE)
    prior_values = rng.standard_normal((num_draws, num_points)) @ factor.T
    noise = np.sqrt(spec.noise_variance) * rng.standard_normal((num_draws, num_points))
    rows = rng.integers(0, num_points, size=num_draws)
    draw = np.arange(num_draws)

    fitted = K[rows] @ weights
    columns = K[:, rows].T
    clean = prior_values[draw, rows] - fitted
    old = -num_points * columns * (clean + noise[draw, rows])[:, None]
    new = -num_points * columns * clean[:, None]
    return np.cov(old, rowvar=False), np.cov(new, rowvar=False)


def slot_targets(slots: Sequence[SampleSlot]) -> Array:
    return np.vstack([slot.targets for slot in slots])
