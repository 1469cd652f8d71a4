from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from django_pathwise_gp.constants.types import ColumnRef
from django_pathwise_gp.data.dataset import (
    Dataset,
    SplitSpec,
    Standardizer,
    load_csv,
    split,
    standardize,
)
from django_pathwise_gp.data.synthetic import GENERATORS, gp_prior_dataset
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelSpec


@dataclass(frozen=True)
class DataSource:
    """Where a run's data comes from and how it is prepared.

    Exactly one of ``path`` (a CSV file) and ``generator`` (a built-in
    synthetic generator) is set. A generator without its own seed uses the
    run seed.
    """

    path: Optional[str] = None
    target_column: ColumnRef = "y"
    generator: Optional[str] = None
    generator_options: Dict[str, Any] = field(default_factory=dict)
    split: Optional[SplitSpec] = None
    standardize: bool = False

    def __post_init__(self) -> None:
        if (self.path is None) == (self.generator is None):
            raise ConfigurationError(
                "A data source needs exactly one of a CSV path and a generator."
            )
        if self.generator is not None and self.generator not in GENERATORS:
            raise ConfigurationError(
                f"unknown generator '{self.generator}'; "
                f"choose one of {sorted(GENERATORS)}."
            )

    def load(self, seed: int, kernel: Optional[KernelSpec] = None) -> Dataset:
        if self.path is not None:
            return load_csv(self.path, self.target_column)
        options = dict(self.generator_options)
        options.setdefault("seed", seed)
        if self.generator == "gp_prior":
            if kernel is None:
                raise ConfigurationError("The gp_prior generator needs a kernel.")
            return gp_prior_dataset(kernel, **options)
        return GENERATORS[self.generator](**options)

    def prepare(
        self, seed: int, kernel: Optional[KernelSpec] = None
    ) -> Tuple[Dataset, Optional[Dataset], Optional[Standardizer]]:
        """Load, split and standardize; the test set reuses the train set's
        standardization."""
        data = self.load(seed, kernel)
        train, test = split(data, self.split) if self.split else (data, None)
        if not self.standardize:
            return train, test, None
        train, standardizer = standardize(train)
        return train, (None if test is None else standardizer.apply(test)), standardizer
