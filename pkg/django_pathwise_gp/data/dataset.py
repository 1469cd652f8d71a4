import csv
import logging
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from django_pathwise_gp.constants.types import Array, ColumnRef
from django_pathwise_gp.exceptions import ConfigurationError, DataError

logger = logging.getLogger(__name__)


def _frozen(array: Array) -> Array:
    array = np.array(array, dtype=np.float64, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Dataset:
    """Training or test data: inputs ``X`` (N×d) and targets ``y`` (N).

    Arrays are copied to float64 and made read-only, so a Dataset can be
    shared freely between threads.

    Attributes:
        inputs (np.ndarray): Input matrix of shape (N, d).
        targets (np.ndarray): Target vector of length N.
        feature_names (Optional[Tuple[str, ...]]): Column names of the inputs.

    """

    inputs: Array
    targets: Array
    feature_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        inputs = np.asarray(self.inputs, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if inputs.ndim == 1:
            inputs = inputs.reshape(-1, 1)
        if inputs.ndim != 2:
            raise DataError(f"inputs must be a matrix, got shape {inputs.shape}.")
        if targets.ndim != 1:
            raise DataError(f"targets must be a vector, got shape {targets.shape}.")
        if inputs.shape[0] != targets.shape[0]:
            raise DataError(
                f"inputs have {inputs.shape[0]} rows but targets have "
                f"{targets.shape[0]} entries."
            )
        if not (np.all(np.isfinite(inputs)) and np.all(np.isfinite(targets))):
            raise DataError("Dataset entries must be finite (no NaN/Inf).")
        names = self.feature_names
        if names is not None and len(names) != inputs.shape[1]:
            raise DataError(
                f"{len(self.feature_names)} feature names given for "
                f"{inputs.shape[1]} input columns."
            )

        object.__setattr__(self, "inputs", _frozen(inputs))
        object.__setattr__(self, "targets", _frozen(targets))
        if self.feature_names is not None:
            object.__setattr__(self, "feature_names", tuple(self.feature_names))

    @property
    def num_points(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def dim(self) -> int:
        return int(self.inputs.shape[1])

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.inputs[idx], self.targets[idx], self.feature_names)

    def append(self, inputs: Array, targets: Array) -> "Dataset":
        """Return a new Dataset with rows appended at the end."""
        inputs = np.asarray(inputs, dtype=np.float64).reshape(-1, self.dim)
        return Dataset(
            np.vstack([self.inputs, inputs]),
            np.concatenate([self.targets, np.asarray(targets, dtype=np.float64)]),
            self.feature_names,
        )

    def with_targets(self, targets: Array) -> "Dataset":
        return Dataset(self.inputs, targets, self.feature_names)


@dataclass(frozen=True)
class Standardizer:
    """Per-column affine maps taking raw data to zero mean and unit
    (population) variance.

    Constant columns keep a deviation of 1 so they are only centred.
    """

    input_mean: Array
    input_std: Array
    target_mean: float
    target_std: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_mean", _frozen(self.input_mean))
        object.__setattr__(self, "input_std", _frozen(self.input_std))
        if np.any(self.input_std <= 0) or not self.target_std > 0:
            raise DataError("Standard deviations must be strictly positive.")

    def transform_inputs(self, inputs: Array) -> Array:
        return (np.asarray(inputs, dtype=np.float64) - self.input_mean) / self.input_std

    def inverse_inputs(self, inputs: Array) -> Array:
        return np.asarray(inputs, dtype=np.float64) * self.input_std + self.input_mean

    def transform_targets(self, targets: Array) -> Array:
        targets = np.asarray(targets, dtype=np.float64)
        return (targets - self.target_mean) / self.target_std

    def inverse_targets(self, targets: Array) -> Array:
        targets = np.asarray(targets, dtype=np.float64)
        return targets * self.target_std + self.target_mean

    def apply(self, data: Dataset) -> Dataset:
        return Dataset(
            self.transform_inputs(data.inputs),
            self.transform_targets(data.targets),
            data.feature_names,
        )

    def destandardize(self, data: Dataset) -> Dataset:
        return Dataset(
            self.inverse_inputs(data.inputs),
            self.inverse_targets(data.targets),
            data.feature_names,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "input_mean": self.input_mean.tolist(),
            "input_std": self.input_std.tolist(),
            "target_mean": float(self.target_mean),
            "target_std": float(self.target_std),
        }


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigurationError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}."
            )
        if self.seed < 0:
            raise ConfigurationError("split seed must be a non-negative integer.")


def _constant_safe_std(values: Array, means: Array) -> Array:
    std = values.std(axis=0)
    scale = np.maximum(1.0, np.abs(means))
    return np.where(std > 1e-12 * scale, std, 1.0)


def standardize(data: Dataset) -> Tuple[Dataset, Standardizer]:
    """Centre and scale every input column and the target.

    Args:
        data (Dataset): Raw data with at least two rows.

    Returns:
        Tuple[Dataset, Standardizer]: The standardized data and the fitted maps.

    Raises:
        DataError: If fewer than two rows are given.

    """
    if data.num_points < 2:
        raise DataError(f"standardize needs at least 2 rows, got {data.num_points}.")

    input_mean = data.inputs.mean(axis=0)
    input_std = _constant_safe_std(data.inputs, input_mean)
    target_mean = float(data.targets.mean())
    target_std = float(
        _constant_safe_std(data.targets.reshape(-1, 1), np.array([target_mean]))[0]
    )
    standardizer = Standardizer(input_mean, input_std, target_mean, target_std)
    return standardizer.apply(data), standardizer


def split_indices(num_points: int, spec: SplitSpec) -> Tuple[Array, Array]:
    if num_points < 2:
        raise DataError(f"split needs at least 2 rows, got {num_points}.")
    permutation = np.random.default_rng(spec.seed).permutation(num_points)
    num_train = int(round(spec.train_fraction * num_points))
    return np.sort(permutation[:num_train]), np.sort(permutation[num_train:])


def split(data: Dataset, spec: SplitSpec) -> Tuple[Dataset, Dataset]:
    """Partition the rows into a train and a test set.

    The train set has ``round(train_fraction * N)`` rows; the same seed always
    yields the same partition.
    """
    train_idx, test_idx = split_indices(data.num_points, spec)
    return data.subset(train_idx), data.subset(test_idx)


def _resolve_target(header: List[str], target_column: ColumnRef) -> int:
    if isinstance(target_column, int) and not isinstance(target_column, bool):
        if not -len(header) <= target_column < len(header):
            raise DataError(
                f"target column index {target_column} out of range for "
                f"{len(header)} columns."
            )
        return target_column % len(header)
    try:
        return header.index(str(target_column))
    except ValueError as e:
        raise DataError(
            f"target column '{target_column}' not found; columns are {header}."
        ) from e


def load_csv(path: str, target_column: ColumnRef) -> Dataset:
    """Read a comma-separated file with a header row into a Dataset.

    Args:
        path (str): Path of the CSV file.
        target_column (str | int): Header name or index of the target column.

    Returns:
        Dataset: The target column becomes ``targets``; the remaining columns
        become ``inputs`` in file order.

    Raises:
        DataError: On a missing file, a missing target column, or a cell that
            is not a finite number (the message names the row and column).

    """
    if not os.path.isfile(path):
        raise DataError(f"CSV file not found: {path}")

    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = [name.strip() for name in next(reader)]
        except StopIteration as e:
            raise DataError(f"CSV file is empty: {path}") from e

        target_idx = _resolve_target(header, target_column)
        rows: List[List[float]] = []
        for row_number, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"row {row_number} has {len(row)} cells, expected {len(header)}."
                )
            values = []
            for column, cell in zip(header, row):
                try:
                    value = float(cell)
                except ValueError as e:
                    raise DataError(
                        f"cannot parse '{cell}' at row {row_number}, column '{column}'."
                    ) from e
                if not math.isfinite(value):
                    raise DataError(
                        f"non-finite value '{cell}' at row {row_number}, "
                        f"column '{column}'."
                    )
                values.append(value)
            rows.append(values)

    table = np.array(rows, dtype=np.float64).reshape(len(rows), len(header))
    input_columns = [i for i in range(len(header)) if i != target_idx]
    logger.info(
        "Loaded %d rows, %d input columns from %s", len(rows), len(input_columns), path
    )
    return Dataset(
        table[:, input_columns],
        table[:, target_idx],
        tuple(header[i] for i in input_columns),
    )


def write_csv(data: Dataset, path: str, target_name: str = "y") -> None:
    """Write a Dataset as CSV; floats use their shortest round-trip repr so a
    reload reproduces the values exactly."""
    names = list(data.feature_names or [f"x{i}" for i in range(data.dim)])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(names + [target_name])
        for inputs, target in zip(data.inputs, data.targets):
            writer.writerow([repr(float(v)) for v in inputs] + [repr(float(target))])
