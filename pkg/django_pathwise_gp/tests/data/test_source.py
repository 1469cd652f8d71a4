import sys

import numpy as np
import pytest

from django_pathwise_gp.data.dataset import SplitSpec
from django_pathwise_gp.data.source import DataSource
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelSpec
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.data,
    pytest.mark.data_source,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


class TestDataSource:
    def test_needs_exactly_one_origin(self) -> None:
        """
        Test that a source needs a path or a generator, not both.

        Asserts:
        -------
            ConfigurationError is raised in both cases.
        """
        with pytest.raises(ConfigurationError):
            DataSource()
        with pytest.raises(ConfigurationError):
            DataSource(path="a.csv", generator="sinusoid")

    def test_unknown_generator(self) -> None:
        """
        Test that generator names are checked.

        Asserts:
        -------
            ConfigurationError is raised.
        """
        with pytest.raises(ConfigurationError, match="unknown generator"):
            DataSource(generator="spiral")

    def test_generator_uses_run_seed(self) -> None:
        """
        Test that a generator without its own seed follows the run seed.

        Asserts:
        -------
            Different run seeds give different data; a fixed seed ignores it.
        """
        source = DataSource(generator="sinusoid", generator_options={"num_points": 10})
        assert not np.array_equal(source.load(0).targets, source.load(1).targets)
        pinned = DataSource(
            generator="sinusoid", generator_options={"num_points": 10, "seed": 3}
        )
        np.testing.assert_array_equal(pinned.load(0).targets, pinned.load(1).targets)

    def test_prepare_standardizes_with_train_statistics(self) -> None:
        """
        Test that the test split reuses the train standardizer.

        Asserts:
        -------
            The train targets are standardized; the test targets follow the
            same affine map.
        """
        source = DataSource(
            generator="sinusoid",
            generator_options={"num_points": 50},
            split=SplitSpec(0.8, 1),
            standardize=True,
        )
        train, test, standardizer = source.prepare(seed=0)
        assert train.num_points == 40 and test.num_points == 10
        assert abs(train.targets.mean()) < 1e-12
        raw = source.load(0)
        restored = standardizer.inverse_targets(test.targets)
        gaps = np.abs(restored[:, None] - raw.targets[None, :]).min(axis=1)
        assert np.all(gaps < 1e-10)

    def test_csv_without_split(self, csv_file: str) -> None:
        """
        Test a CSV source without a split or standardization.

        Args:
        ----
            csv_file (str): Fixture path with columns a, b, y.

        Asserts:
        -------
            All rows are training data and no test set is returned.
        """
        train, test, standardizer = DataSource(path=csv_file).prepare(seed=0)
        assert train.num_points == 4
        assert test is None and standardizer is None

    def test_gp_prior_needs_kernel(self, se_spec: KernelSpec) -> None:
        """
        Test that the gp_prior generator requires a kernel.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.

        Asserts:
        -------
            Loading without a kernel fails; with one it succeeds.
        """
        source = DataSource(
            generator="gp_prior",
            generator_options={"num_points": 8, "num_features": 20},
        )
        with pytest.raises(ConfigurationError):
            source.load(0)
        assert source.load(0, se_spec).num_points == 8
