import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Protocol, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import (
    CholeskyError,
    ConfigurationError,
    ConvergenceError,
)
from django_pathwise_gp.kernels.spec import KernelSpec, gram, kernel_diagonal
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.solvers.objectives import RepresenterModel, SampleSlot

logger = logging.getLogger(__name__)

Operator = Union[Array, LinearOperator, Callable[[Array], Array]]

# Residual diagonals below this are a breakdown, not roundoff
BREAKDOWN_TOLERANCE = -1e-10


@dataclass(frozen=True)
class CgConfig:
    """Conjugate-gradient settings.

    Attributes:
        max_iters (int): Iteration budget.
        tolerance (float): Target relative residual ‖Av − b‖/‖b‖.
        preconditioner_rank (int): Rank of the pivoted Cholesky
            preconditioner; 0 disables preconditioning.
        snapshot_every (int): Keep a copy of the iterate every this many
            iterations; 0 keeps none.

    """

    max_iters: int = field(default_factory=lambda: config.cg_max_iters)
    tolerance: float = field(default_factory=lambda: config.cg_tolerance)
    preconditioner_rank: int = field(
        default_factory=lambda: config.cg_preconditioner_rank
    )
    snapshot_every: int = 0

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ConfigurationError(
                f"max_iters must be at least 1, got {self.max_iters}."
            )
        if not self.tolerance > 0:
            raise ConfigurationError(
                f"tolerance must be positive, got {self.tolerance}."
            )
        if self.preconditioner_rank < 0 or self.snapshot_every < 0:
            raise ConfigurationError(
                "preconditioner_rank and snapshot_every must be non-negative."
            )


@dataclass
class CgResult:
    """Outcome of :func:`cg_solve`.

    ``residual_history[0]`` is the initial relative residual (1.0 for a zero
    start), so ``iterations == len(residual_history) - 1``.
    """

    solution: Array
    residual_history: List[float]
    converged: bool
    snapshots: List[Tuple[int, Array]] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.residual_history) - 1

    def __iter__(self) -> Iterator:
        return iter((self.solution, self.iterations, self.residual_history))


def as_operator(operator: Operator, size: int) -> LinearOperator:
    if callable(operator) and not isinstance(operator, (np.ndarray, LinearOperator)):
        return LinearOperator((size, size), matvec=operator, dtype=np.float64)
    return aslinearoperator(operator)


def cg_solve(
    matvec: Operator,
    b: Array,
    cg_config: Optional[CgConfig] = None,
    precond: Optional[Operator] = None,
) -> CgResult:
    """Solve A v = b for symmetric positive definite A with (preconditioned)
    conjugate gradients, starting from v = 0.

    Args:
        matvec: The operator A as a matrix, LinearOperator or callable.
        b (np.ndarray): Right-hand side.
        cg_config (Optional[CgConfig]): Budget and tolerance.
        precond: Optional operator applying P⁻¹.

    Returns:
        CgResult: Solution, per-iteration relative residuals and snapshots.

    Raises:
        ConvergenceError: If an iterate becomes non-finite or a search
            direction has non-positive curvature.

    """
    cg_config = cg_config or CgConfig()
    b = np.asarray(b, dtype=np.float64)
    size = b.shape[0]
    A = as_operator(matvec, size)
    M = None if precond is None else as_operator(precond, size)

    solution = np.zeros(size)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return CgResult(solution, [0.0], converged=True)

    residual = b.copy()
    z = residual if M is None else M.matvec(residual)
    direction = z.copy()
    rz = float(residual @ z)
    history = [1.0]
    snapshots: List[Tuple[int, Array]] = []
    converged = False

    for iteration in range(1, cg_config.max_iters + 1):
        A_direction = A.matvec(direction)
        curvature = float(direction @ A_direction)
        if not math.isfinite(curvature) or curvature <= 0.0:
            raise ConvergenceError(
                f"CG broke down at iteration {iteration}: curvature {curvature}; "
                "the operator is not positive definite.",
                iteration,
            )
        step = rz / curvature
        solution += step * direction
        residual -= step * A_direction
        relative = float(np.linalg.norm(residual)) / b_norm
        if not math.isfinite(relative):
            raise ConvergenceError(
                f"CG produced non-finite iterates at iteration {iteration}.", iteration
            )
        history.append(relative)
        if cg_config.snapshot_every and iteration % cg_config.snapshot_every == 0:
            snapshots.append((iteration, solution.copy()))
        if relative <= cg_config.tolerance:
            converged = True
            break

        z = residual if M is None else M.matvec(residual)
        rz_next = float(residual @ z)
        direction = z + (rz_next / rz) * direction
        rz = rz_next

    return CgResult(solution, history, converged, snapshots)


class GramAccessor(Protocol):
    size: int

    def diagonal(self) -> Array:
        ...

    def column(self, index: int) -> Array:
        ...


class DenseGramAccessor:
    def __init__(self, matrix: Array) -> None:
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.size = self.matrix.shape[0]

    def diagonal(self) -> Array:
        return np.diag(self.matrix).copy()

    def column(self, index: int) -> Array:
        return self.matrix[:, index]


class KernelGramAccessor:
    """Columns of K_xx computed on demand, without forming the matrix."""

    def __init__(self, spec: KernelSpec, inputs: Array) -> None:
        self.spec = spec
        self.inputs = np.asarray(inputs, dtype=np.float64)
        self.size = self.inputs.shape[0]

    def diagonal(self) -> Array:
        return kernel_diagonal(self.spec, self.size)

    def column(self, index: int) -> Array:
        return gram(self.spec, self.inputs, self.inputs[index : index + 1])[:, 0]


@dataclass(frozen=True)
class LowRankFactor:
    """Pivoted partial Cholesky factor with L Lᵀ ≈ K.

    Attributes:
        factor (np.ndarray): N×r matrix L.
        pivots (List[int]): Pivot indices in selection order.
        residual_traces (List[float]): trace(K − L_m L_mᵀ) for m = 0..r.

    """

    factor: Array
    pivots: List[int]
    residual_traces: List[float]

    @property
    def rank(self) -> int:
        return int(self.factor.shape[1])


def pivoted_cholesky(accessor: GramAccessor, rank: int) -> LowRankFactor:
    """Greedy pivoted partial Cholesky decomposition.

    Each step pivots on the largest residual diagonal (the first one on
    ties) and stops early once the residual diagonal vanishes, so the
    returned rank never exceeds the numerical rank of K.

    Raises:
        CholeskyError: If a residual diagonal drops below −1e-10.

    """
    if rank < 0:
        raise ConfigurationError(f"rank must be non-negative, got {rank}.")
    residual = np.array(accessor.diagonal(), dtype=np.float64)
    scale = max(float(residual.max(initial=0.0)), 1e-300)
    columns: List[Array] = []
    pivots: List[int] = []
    traces = [float(residual.sum())]

    for _ in range(min(rank, accessor.size)):
        pivot = int(np.argmax(residual))
        if residual[pivot] <= 1e-12 * scale:
            break
        column = np.array(accessor.column(pivot), dtype=np.float64)
        for previous in columns:
            column -= previous * previous[pivot]
        column /= math.sqrt(residual[pivot])
        residual -= column**2
        residual[pivot] = 0.0
        if residual.min() < BREAKDOWN_TOLERANCE:
            index = int(np.argmin(residual))
            raise CholeskyError(
                f"Pivoted Cholesky broke down: residual diagonal {residual[index]:.3e} "
                f"at index {index}.",
                index,
                float(residual[index]),
            )
        columns.append(column)
        pivots.append(pivot)
        traces.append(float(np.clip(residual, 0.0, None).sum()))

    factor = np.column_stack(columns) if columns else np.zeros((accessor.size, 0))
    return LowRankFactor(factor, pivots, traces)


def woodbury_preconditioner(factor: Array, noise_variance: float) -> LinearOperator:
    """Operator applying (L Lᵀ + σ²I)⁻¹ through the Woodbury identity:
    P⁻¹b = (b − L(σ²I + LᵀL)⁻¹Lᵀb)/σ²."""
    factor = np.asarray(factor, dtype=np.float64)
    size, rank = factor.shape
    inner = cho_factor(noise_variance * np.eye(rank) + factor.T @ factor, lower=True)

    def apply(vector: Array) -> Array:
        vector = np.ravel(vector)
        if rank == 0:
            return vector / noise_variance
        correction = factor @ cho_solve(inner, factor.T @ vector)
        return (vector - correction) / noise_variance

    return LinearOperator((size, size), matvec=apply, dtype=np.float64)


def kernel_operator(spec: KernelSpec, inputs: Array) -> Operator:
    """K_xx + σ²I as a dense matrix up to ``DENSE_KERNEL_MAX_POINTS``, or as
    a row-blocked matvec beyond that."""
    inputs = np.asarray(inputs, dtype=np.float64)
    size = inputs.shape[0]
    if size <= config.dense_kernel_max_points:
        matrix = gram(spec, inputs, inputs)
        matrix[np.diag_indices_from(matrix)] += spec.noise_variance
        return matrix

    block = config.dense_kernel_max_points

    def matvec(vector: Array) -> Array:
        vector = np.ravel(vector)
        out = np.empty(size)
        for start in range(0, size, block):
            rows = gram(spec, inputs[start : start + block], inputs)
            out[start : start + block] = rows @ vector
        return out + spec.noise_variance * vector

    return LinearOperator((size, size), matvec=matvec, dtype=np.float64)


def _preconditioner(
    spec: KernelSpec, inputs: Array, cg_config: CgConfig
) -> Optional[LinearOperator]:
    if cg_config.preconditioner_rank == 0:
        return None
    low_rank = pivoted_cholesky(
        KernelGramAccessor(spec, inputs), cg_config.preconditioner_rank
    )
    return woodbury_preconditioner(low_rank.factor, spec.noise_variance)


def _log_result(label: str, result: CgResult, cg_config: CgConfig) -> None:
    if result.converged:
        logger.info(
            "CG %s converged in %d iterations (residual %.3e)",
            label,
            result.iterations,
            result.residual_history[-1],
        )
    else:
        logger.warning(
            "CG %s did not reach tolerance %g within %d iterations (residual %.3e)",
            label,
            cg_config.tolerance,
            cg_config.max_iters,
            result.residual_history[-1],
        )


def cg_posterior_mean(
    spec: KernelSpec, data: Dataset, cg_config: Optional[CgConfig] = None
) -> Tuple[RepresenterModel, CgResult]:
    """Posterior-mean representer weights v = (K_xx + σ²I)⁻¹y by CG."""
    cg_config = cg_config or CgConfig()
    result = cg_solve(
        kernel_operator(spec, data.inputs),
        data.targets,
        cg_config,
        _preconditioner(spec, data.inputs, cg_config),
    )
    _log_result("mean solve", result, cg_config)
    model = RepresenterModel(spec, data.inputs, mean_weights=result.solution)
    return model, result


def cg_sample_weights(
    spec: KernelSpec,
    data: Dataset,
    slots: Sequence[SampleSlot],
    cg_config: Optional[CgConfig] = None,
) -> Tuple[RepresenterModel, List[CgResult]]:
    """Sample representer weights α_s = (K_xx + σ²I)⁻¹(f_s(x) + ε_s), one CG
    solve per slot sharing one operator and preconditioner."""
    cg_config = cg_config or CgConfig()
    operator = kernel_operator(spec, data.inputs)
    precond = _preconditioner(spec, data.inputs, cg_config)
    results = []
    for slot in slots:
        result = cg_solve(operator, slot.targets, cg_config, precond)
        _log_result(f"sample {slot.index}", result, cg_config)
        results.append(result)
    weights = np.vstack([result.solution for result in results])
    model = RepresenterModel(spec, data.inputs, sample_weights=weights, slots=slots)
    return model, results
