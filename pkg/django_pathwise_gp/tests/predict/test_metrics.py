import math
import sys

import numpy as np
import pytest

from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.data.synthetic import sinusoid_dataset
from django_pathwise_gp.exceptions import ConfigurationError, DataError
from django_pathwise_gp.kernels.spec import KernelSpec, gram
from django_pathwise_gp.oracle.exact import fit_exact
from django_pathwise_gp.predict.ensemble import assemble, exact_models
from django_pathwise_gp.predict.metrics import (
    exact_metrics,
    metrics,
    metrics_from_moments,
    paired_w2_profile,
    w2_gaussian,
    w2_profile,
)
from django_pathwise_gp.solvers.objectives import init_sample_slots
from django_pathwise_gp.solvers.sgd import SgdConfig, fit_mean_sgd, fit_samples_sgd
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.predict,
    pytest.mark.predict_metrics,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


class TestMetricsFromMoments:
    def test_hand_values(self) -> None:
        """
        Test RMSE and NLL against hand-computed values.

        Asserts:
        -------
            Perfect predictions with unit total variance give RMSE 0 and
            NLL ½ log 2π.
        """
        result = metrics_from_moments(
            np.zeros(3), np.full(3, 0.75), np.zeros(3), noise_variance=0.25
        )
        assert result.rmse == 0.0
        assert result.nll == pytest.approx(0.5 * math.log(2.0 * math.pi))
        assert result.to_dict() == {"rmse": 0.0, "nll": result.nll}

    def test_rmse(self) -> None:
        """
        Test the RMSE of constant errors.

        Asserts:
        -------
            Errors of ±2 give an RMSE of 2.
        """
        result = metrics_from_moments(
            np.array([2.0, -2.0]), np.ones(2), np.zeros(2), 0.1
        )
        assert result.rmse == pytest.approx(2.0)

    def test_shape_mismatch(self) -> None:
        """
        Test that predictions and targets must align.

        Asserts:
        -------
            DataError is raised.
        """
        with pytest.raises(DataError):
            metrics_from_moments(np.zeros(2), np.ones(2), np.zeros(3), 0.1)


class TestW2:
    def test_gaussian_distance(self) -> None:
        """
        Test W2 between one-dimensional Gaussians.

        Asserts:
        -------
            A 3-4-5 triangle and broadcasting over arrays.
        """
        assert w2_gaussian(0.0, 1.0, 3.0, 5.0) == pytest.approx(5.0)
        np.testing.assert_allclose(
            w2_gaussian(np.zeros(2), np.ones(2), np.ones(2), np.ones(2)), [1.0, 1.0]
        )

    def test_negative_deviation(self) -> None:
        """
        Test that negative standard deviations are rejected.

        Asserts:
        -------
            ConfigurationError is raised.
        """
        with pytest.raises(ConfigurationError):
            w2_gaussian(0.0, -1.0, 0.0, 1.0)

    def test_profile_small_for_exact_ensemble(
        self, se_spec: KernelSpec, toy_data: Dataset
    ) -> None:
        """
        Test the W2 profile of an exactly solved ensemble.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            Only Monte Carlo error remains, and the metrics of the ensemble
            are close to the exact ones.
        """
        post = fit_exact(se_spec, toy_data)
        slots = init_sample_slots(se_spec, toy_data.inputs, 256, 200, seed=0)
        ens = assemble(*exact_models(post, slots))
        profile = w2_profile(ens, post, toy_data.inputs)
        assert profile.shape == (toy_data.num_points,)
        assert np.max(profile) < 0.1
        assert metrics(ens, toy_data).rmse == pytest.approx(
            exact_metrics(post, toy_data).rmse, rel=1e-8
        )


class TestPairedW2:
    def test_identical_ensembles(self, se_spec: KernelSpec, toy_data: Dataset) -> None:
        """
        Test the paired profile of an ensemble against itself.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            The distance is zero everywhere.
        """
        post = fit_exact(se_spec, toy_data)
        slots = init_sample_slots(se_spec, toy_data.inputs, 8, 100, seed=0)
        ens = assemble(*exact_models(post, slots))
        np.testing.assert_array_equal(
            paired_w2_profile(ens, ens, toy_data.inputs), 0.0
        )

    def test_sample_counts_must_agree(
        self, se_spec: KernelSpec, toy_data: Dataset
    ) -> None:
        """
        Test that ensembles of different sizes cannot be paired.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            ConfigurationError is raised.
        """
        post = fit_exact(se_spec, toy_data)
        slots = init_sample_slots(se_spec, toy_data.inputs, 8, 100, seed=0)
        ens = assemble(*exact_models(post, slots))
        smaller = assemble(*exact_models(post, slots[:4]))
        with pytest.raises(ConfigurationError):
            paired_w2_profile(ens, smaller, toy_data.inputs)

    def test_error_geography_of_sgd(self, se_spec: KernelSpec) -> None:
        """
        Test where the SGD ensemble departs from the exact posterior: little
        inside the training interval, most just beyond its edges, and not at
        all far away where both fall back to the shared prior draws.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel of lengthscale 0.5.

        Asserts:
        -------
            The mean distance inside the data is below the mean distance in
            the band up to two lengthscales past the edges, and the distance
            beyond ten lengthscales is below 1e-3 σ_f.
        """
        data = sinusoid_dataset(400, seed=0, noise_variance=0.1)
        K = gram(se_spec, data.inputs, data.inputs)
        largest = np.linalg.eigvalsh(K)[-1]
        cfg = SgdConfig(
            steps=3000,
            learning_rate=0.5 * data.num_points / largest**2,
            batch_size=64,
            momentum=0.9,
            regularizer_features=0,
            polyak_averaging=True,
            seed=0,
        )
        slots = init_sample_slots(se_spec, data.inputs, 16, 1000, seed=0)
        mean_model, _ = fit_mean_sgd(data, se_spec, cfg)
        sample_model, _ = fit_samples_sgd(data, se_spec, slots, cfg)
        ens = assemble(mean_model, sample_model)
        reference = assemble(*exact_models(fit_exact(se_spec, data), slots))

        queries = np.linspace(-12.0, 12.0, 241)[:, None]
        profile = paired_w2_profile(ens, reference, queries)
        lengthscale = se_spec.lengthscales[0]
        beyond = np.abs(queries[:, 0]) - 3.0
        interior = profile[beyond <= 0.0]
        band = profile[(beyond > 0.0) & (beyond <= 2.0 * lengthscale)]
        far = profile[beyond > 10.0 * lengthscale]
        assert interior.mean() < band.mean(), (interior.mean(), band.mean())
        assert far.max() < 1e-3 * np.sqrt(se_spec.signal_variance)
