import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from django_pathwise_gp.constants.streams import STREAM_SGD
from django_pathwise_gp.constants.types import Array, GradientFn
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import ConfigurationError, DivergenceError
from django_pathwise_gp.kernels.features import FourierFeatureMap, draw_frequencies
from django_pathwise_gp.kernels.spec import KernelSpec, gram
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.solvers.objectives import (
    RepresenterModel,
    SampleSlot,
    data_term_gradient,
    regularizer_gradient,
)
from django_pathwise_gp.utils.random import make_rng

logger = logging.getLogger(__name__)

Monitor = Callable[[int, Array], Dict[str, float]]


@dataclass(frozen=True)
class SgdConfig:
    """Settings of one SGD run.

    Attributes:
        steps (int): Number of iterations t.
        batch_size (int): Minibatch size D; values ≥ N use the full batch.
        learning_rate (float): Step size η of the scaled objective.
        momentum (float): Nesterov momentum β in [0, 1).
        regularizer_features (int): Fourier features redrawn per step for the
            regularizer; 0 uses the exact kernel matrix.
        polyak_averaging (bool): Return the average of iterates 1..t instead
            of the last one.
        seed (int): Root seed of the minibatch and feature streams.
        trace_every (int): Checkpoint cadence of the OptTrace.
        divergence_threshold (float): Weight norm that aborts the run.

    """

    steps: int
    learning_rate: float
    batch_size: int = field(default_factory=lambda: config.batch_size)
    momentum: float = field(default_factory=lambda: config.momentum)
    regularizer_features: int = field(
        default_factory=lambda: config.regularizer_features
    )
    polyak_averaging: bool = field(default_factory=lambda: config.polyak_averaging)
    seed: int = 0
    trace_every: int = field(default_factory=lambda: config.trace_every)
    divergence_threshold: float = field(
        default_factory=lambda: config.divergence_threshold
    )

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigurationError(f"steps must be at least 1, got {self.steps}.")
        if not self.learning_rate > 0:
            raise ConfigurationError(
                f"learning_rate must be positive, got {self.learning_rate}."
            )
        if not 0.0 <= self.momentum < 1.0:
            raise ConfigurationError(
                f"momentum must lie in [0, 1), got {self.momentum}."
            )
        if self.batch_size < 1:
            raise ConfigurationError(
                f"batch_size must be at least 1, got {self.batch_size}."
            )
        if self.regularizer_features < 0 or self.regularizer_features % 2:
            raise ConfigurationError(
                "regularizer_features must be an even non-negative integer, "
                f"got {self.regularizer_features}."
            )
        if self.trace_every < 1:
            raise ConfigurationError("trace_every must be at least 1.")

    @classmethod
    def for_mean(cls, **overrides: Any) -> "SgdConfig":
        overrides.setdefault("steps", config.steps)
        overrides.setdefault("learning_rate", config.mean_learning_rate)
        return cls(**overrides)

    @classmethod
    def for_samples(cls, **overrides: Any) -> "SgdConfig":
        overrides.setdefault("steps", config.steps)
        overrides.setdefault("learning_rate", config.sample_learning_rate)
        return cls(**overrides)


@dataclass(frozen=True)
class TraceRecord:
    step: int
    wall_time: float
    weight_norm: float
    weights: Array
    diagnostics: Dict[str, float] = field(default_factory=dict)


@dataclass
class OptTrace:
    """Checkpoints of an SGD run, in strictly increasing step order."""

    records: List[TraceRecord] = field(default_factory=list)

    def append(self, record: TraceRecord) -> None:
        if self.records and record.step <= self.records[-1].step:
            raise ValueError(
                f"trace steps must increase: {record.step} after "
                f"{self.records[-1].step}."
            )
        self.records.append(record)

    @property
    def steps(self) -> List[int]:
        return [record.step for record in self.records]

    def rows(self) -> List[Dict[str, Any]]:
        """Flat rows (step, time_s, weight_norm, diagnostics...) for CSV output."""
        return [
            {
                "step": record.step,
                "time_s": record.wall_time,
                "weight_norm": record.weight_norm,
                **record.diagnostics,
            }
            for record in self.records
        ]


def run_sgd(
    gradient_fn: GradientFn,
    sgd_config: SgdConfig,
    initial: Array,
    stream: Sequence[int] = (),
    monitor: Optional[Monitor] = None,
) -> Tuple[Array, OptTrace]:
    """Minimize an objective from stochastic gradients with Nesterov momentum
    and Polyak averaging.

    Each step evaluates ``g = gradient_fn(w, rng)`` and updates
    ``m ← βm + g``, ``w ← w − η(g + βm)``. The reported weights are the
    uniform average of iterates 1..t (or the last iterate when averaging is
    off). Randomness comes from the stream ``(seed, STREAM_SGD, *stream)``.

    Args:
        gradient_fn (GradientFn): Stochastic gradient callable.
        sgd_config (SgdConfig): Step count, learning rate, momentum, ...
        initial (np.ndarray): Starting weights.
        stream (Sequence[int]): Extra stream keys, e.g. a sample slot index.
        monitor (Optional[Callable]): Called at checkpoints with the step and
            the reported weights; its dict is stored in the trace.

    Returns:
        Tuple[np.ndarray, OptTrace]: Final reported weights and the trace.

    Raises:
        DivergenceError: If the weight norm becomes non-finite or exceeds the
            divergence threshold.

    """
    rng = make_rng(sgd_config.seed, STREAM_SGD, *stream)
    weights = np.array(initial, dtype=np.float64, copy=True)
    velocity = np.zeros_like(weights)
    average = np.zeros_like(weights)
    beta = sgd_config.momentum
    trace = OptTrace()
    started = time.perf_counter()

    for step in range(1, sgd_config.steps + 1):
        grad = gradient_fn(weights, rng)
        velocity = beta * velocity + grad
        weights = weights - sgd_config.learning_rate * (grad + beta * velocity)
        average += (weights - average) / step

        norm = float(np.linalg.norm(weights))
        if not math.isfinite(norm) or norm > sgd_config.divergence_threshold:
            raise DivergenceError(
                f"SGD diverged at step {step}: weight norm {norm:.3e}; "
                "reduce the learning rate.",
                step,
                norm,
            )

        if step % sgd_config.trace_every == 0 or step == sgd_config.steps:
            reported = average if sgd_config.polyak_averaging else weights
            diagnostics = monitor(step, reported) if monitor else {}
            trace.append(
                TraceRecord(
                    step,
                    time.perf_counter() - started,
                    float(np.linalg.norm(reported)),
                    reported.copy(),
                    diagnostics,
                )
            )
            logger.debug("step %d: |w| = %.6g %s", step, norm, diagnostics)

    result = average if sgd_config.polyak_averaging else weights
    return result, trace


class RepresenterObjective:
    """Stochastic gradient of a representer-weight objective, scaled by
    σ²/(2N) so that step sizes do not depend on N or σ².

    With ``anchors`` left out the objective is the full one over the training
    inputs; otherwise it is the inducing-point objective over ``anchors``.
    The kernel block K_xA is cached densely when N is at most
    ``DENSE_KERNEL_MAX_POINTS``.

    Args:
        data (Dataset): Training data.
        spec (KernelSpec): Kernel and noise.
        targets (np.ndarray): Data-fit targets (y, or f(x) for samples).
        batch_size (int): Minibatch size.
        regularizer_features (int): Features per step, 0 for the exact regularizer.
        anchors (Optional[np.ndarray]): Inducing points z.
        delta (Optional[np.ndarray]): Regularizer shift δ of a sample slot.

    """

    def __init__(
        self,
        data: Dataset,
        spec: KernelSpec,
        targets: Array,
        batch_size: int,
        regularizer_features: int,
        anchors: Optional[Array] = None,
        delta: Optional[Array] = None,
        cross_kernel: Optional[Array] = None,
    ) -> None:
        self.data = data
        self.spec = spec
        self.targets = np.asarray(targets, dtype=np.float64)
        self.batch_size = batch_size
        self.inducing = anchors is not None
        self.anchors = data.inputs if anchors is None else np.asarray(anchors)
        self.scale = spec.noise_variance / (2.0 * data.num_points)

        self.cross_kernel = cross_kernel
        if cross_kernel is None and data.num_points <= config.dense_kernel_max_points:
            self.cross_kernel = gram(spec, data.inputs, self.anchors)

        self.anchor_kernel: Optional[Array] = None
        self.regularizer_features = regularizer_features
        if self.inducing and self.anchors.shape[0] <= config.inducing_exact_max_points:
            self.regularizer_features = 0
        if self.regularizer_features == 0:
            self.anchor_kernel = (
                self.cross_kernel
                if not self.inducing and self.cross_kernel is not None
                else gram(spec, self.anchors, self.anchors)
            )

        self.delta = delta
        self.linear_term: Optional[Array] = None
        if self.inducing and delta is not None:
            cross = self.cross_kernel
            if cross is None:
                cross = gram(spec, data.inputs, self.anchors)
            self.linear_term = cross.T @ delta

    def _rows(self, batch: Array) -> Array:
        if self.cross_kernel is not None:
            return self.cross_kernel[batch]
        return gram(self.spec, self.data.inputs[batch], self.anchors)

    def _batch(self, rng: np.random.Generator) -> Array:
        if self.batch_size >= self.data.num_points:
            return np.arange(self.data.num_points)
        return rng.integers(0, self.data.num_points, size=self.batch_size)

    def raw_gradient(self, weights: Array, rng: np.random.Generator) -> Array:
        batch = self._batch(rng)
        grad = data_term_gradient(
            self._rows(batch),
            weights,
            self.targets[batch],
            self.data.num_points,
            self.spec.noise_variance,
        )
        shifted = weights
        if self.delta is not None and not self.inducing:
            shifted = weights - self.delta
        if self.anchor_kernel is not None:
            grad = grad + 2.0 * (self.anchor_kernel @ shifted)
        else:
            feature_map = FourierFeatureMap(
                draw_frequencies(self.spec, self.regularizer_features // 2, rng),
                self.spec.signal_variance,
            )
            grad = grad + regularizer_gradient(
                self.anchors, shifted, self.spec, feature_map
            )
        if self.linear_term is not None:
            grad = grad - 2.0 * self.linear_term
        return grad

    def __call__(self, weights: Array, rng: np.random.Generator) -> Array:
        return self.scale * self.raw_gradient(weights, rng)


def _initial(initial: Optional[Array], size: int) -> Array:
    if initial is None:
        return np.zeros(size)
    initial = np.asarray(initial, dtype=np.float64)
    if initial.shape != (size,):
        raise ConfigurationError(
            f"initial weights have shape {initial.shape}; expected ({size},)."
        )
    return initial


def fit_mean_sgd(
    data: Dataset,
    spec: KernelSpec,
    sgd_config: SgdConfig,
    anchors: Optional[Array] = None,
    initial: Optional[Array] = None,
    monitor: Optional[Monitor] = None,
) -> Tuple[RepresenterModel, OptTrace]:
    """Estimate the posterior-mean representer weights v by SGD."""
    objective = RepresenterObjective(
        data,
        spec,
        data.targets,
        sgd_config.batch_size,
        sgd_config.regularizer_features,
        anchors=anchors,
    )
    logger.info(
        "Fitting mean weights: %d anchors, %d steps, lr %g",
        objective.anchors.shape[0],
        sgd_config.steps,
        sgd_config.learning_rate,
    )
    weights, trace = run_sgd(
        objective,
        sgd_config,
        _initial(initial, objective.anchors.shape[0]),
        monitor=monitor,
    )
    logger.info("Mean weights fitted, |v| = %.6g", float(np.linalg.norm(weights)))
    return RepresenterModel(spec, objective.anchors, mean_weights=weights), trace


def fit_samples_sgd(
    data: Dataset,
    spec: KernelSpec,
    slots: Sequence[SampleSlot],
    sgd_config: SgdConfig,
    anchors: Optional[Array] = None,
    initial: Optional[Array] = None,
    threads: Optional[int] = None,
) -> Tuple[RepresenterModel, List[OptTrace]]:
    """Estimate the sample representer weights α_s of every slot by SGD.

    Slots are optimized independently, in parallel over ``threads`` workers;
    slot ``s`` draws its minibatches and features from its own stream, so
    the result does not depend on the number of threads.

    Args:
        initial (Optional[np.ndarray]): Warm-start weights of shape (S, M).

    """
    slots = list(slots)
    if not slots:
        raise ConfigurationError("fit_samples_sgd needs at least one sample slot.")
    anchor_points = data.inputs if anchors is None else np.asarray(anchors)
    num_anchors = anchor_points.shape[0]
    cross_kernel = (
        gram(spec, data.inputs, anchor_points)
        if data.num_points <= config.dense_kernel_max_points
        else None
    )
    starts = (
        np.zeros((len(slots), num_anchors))
        if initial is None
        else np.asarray(initial, dtype=np.float64)
    )
    if starts.shape != (len(slots), num_anchors):
        raise ConfigurationError(
            f"initial sample weights have shape {starts.shape}; "
            f"expected ({len(slots)}, {num_anchors})."
        )

    def fit_one(position: int) -> Tuple[Array, OptTrace]:
        slot = slots[position]
        objective = RepresenterObjective(
            data,
            spec,
            slot.prior_values,
            sgd_config.batch_size,
            sgd_config.regularizer_features,
            anchors=anchors,
            delta=slot.delta,
            cross_kernel=cross_kernel,
        )
        return run_sgd(objective, sgd_config, starts[position], stream=(slot.index,))

    logger.info(
        "Fitting %d sample slots: %d anchors, %d steps, lr %g",
        len(slots),
        num_anchors,
        sgd_config.steps,
        sgd_config.learning_rate,
    )
    with ThreadPoolExecutor(max_workers=threads or config.threads) as pool:
        results = list(pool.map(fit_one, range(len(slots))))

    weights = np.vstack([result[0] for result in results])
    model = RepresenterModel(spec, anchor_points, sample_weights=weights, slots=slots)
    return model, [result[1] for result in results]

