import sys

import numpy as np
import pytest

from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import ConfigurationError, DataError
from django_pathwise_gp.kernels.features import sample_feature_map
from django_pathwise_gp.kernels.spec import KernelFamily, KernelSpec, gram
from django_pathwise_gp.solvers.objectives import (
    RepresenterModel,
    dense_inducing_mean_gradient,
    dense_inducing_sample_gradient,
    dense_mean_gradient,
    dense_sample_gradient,
    inducing_closed_form,
    inducing_mean_grad_estimate,
    inducing_sample_grad_estimate,
    init_sample_slots,
    make_sample_slot,
    mean_grad_estimate,
    representer_closed_form,
    sample_grad_estimate,
    sampling_gradient_covariances,
)
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.solvers,
    pytest.mark.solvers_objectives,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


def _problem(seed: int, num_points: int, dim: int, family: KernelFamily):
    rng = np.random.default_rng(seed)
    spec = KernelSpec(
        family,
        rng.uniform(0.5, 2.0),
        tuple(rng.uniform(0.2, 1.0, size=dim)),
        rng.uniform(0.01, 1.0),
    )
    data = Dataset(rng.random((num_points, dim)), rng.standard_normal(num_points))
    return spec, data, rng


class TestSampleSlot:
    def test_reproducible_and_independent(self, se_spec: KernelSpec) -> None:
        """
        Test that slots are keyed by seed and index.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.

        Asserts:
        -------
            Rebuilding a slot reproduces it; two slots differ.
        """
        X = np.linspace(-1.0, 1.0, 10).reshape(-1, 1)
        slots = init_sample_slots(se_spec, X, 2, 50, seed=3)
        again = make_sample_slot(se_spec, X, 50, seed=3, index=1)
        np.testing.assert_array_equal(slots[1].prior_values, again.prior_values)
        np.testing.assert_array_equal(slots[1].noise, again.noise)
        assert not np.array_equal(slots[0].noise, slots[1].noise)
        np.testing.assert_allclose(slots[0].delta, slots[0].noise / 0.1)

    def test_extend_keeps_existing_rows(self, se_spec: KernelSpec) -> None:
        """
        Test that extending a slot keeps its old values and adds new ones.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.

        Asserts:
        -------
            The first rows are unchanged and the new prior values match the
            slot's prior function.
        """
        slot = make_sample_slot(se_spec, np.zeros((4, 1)), 20, seed=0, index=0)
        grown = slot.extend(np.array([[0.5], [1.0]]))
        assert grown.num_points == 6
        np.testing.assert_array_equal(grown.noise[:4], slot.noise)
        np.testing.assert_allclose(grown.prior_values[4:], slot.prior([[0.5], [1.0]]))

    def test_no_samples(self, se_spec: KernelSpec) -> None:
        """
        Test that at least one slot is required.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.

        Asserts:
        -------
            ConfigurationError is raised.
        """
        with pytest.raises(ConfigurationError):
            init_sample_slots(se_spec, np.zeros((3, 1)), 0, 10, seed=0)


class TestRepresenterModel:
    def test_shape_checks(self) -> None:
        """
        Test that weight shapes must match the anchors and slots.

        Asserts:
        -------
            DataError is raised for mismatched shapes.
        """
        spec = KernelSpec(KernelFamily.SQUARED_EXPONENTIAL, 1.0, (1.0,), 0.1)
        anchors = np.zeros((3, 1))
        with pytest.raises(DataError):
            RepresenterModel(spec, anchors, mean_weights=np.zeros(4))
        with pytest.raises(DataError):
            RepresenterModel(spec, anchors, sample_weights=np.zeros((2, 3)))


class TestGradientEstimates:
    @pytest.mark.parametrize("family", list(KernelFamily))
    def test_shifted_and_plain_sampling_gradients_agree(
        self, family: KernelFamily
    ) -> None:
        """
        Test that the shifted and the plain sampling objectives have the same
        gradient on 100 random instances.

        Args:
        ----
            family (KernelFamily): Kernel family under test.

        Asserts:
        -------
            The dense gradients agree to 1e-10 relative to their scale.
        """
        for instance in range(50):
            num_points = 4 + instance % 60
            spec, data, rng = _problem(instance, num_points, 1 + instance % 3, family)
            K = gram(spec, data.inputs, data.inputs)
            slot = make_sample_slot(spec, data.inputs, 20, seed=instance, index=0)
            weights = rng.standard_normal(num_points)
            shifted = dense_sample_gradient(weights, K, slot, shifted=True)
            plain = dense_sample_gradient(weights, K, slot, shifted=False)
            scale = max(1.0, float(np.max(np.abs(plain))))
            assert np.max(np.abs(shifted - plain)) < 1e-10 * scale

    def test_minibatches_average_to_the_dense_gradient(
        self, matern_spec: KernelSpec, random_data: Dataset
    ) -> None:
        """
        Test unbiasedness of the data term: the average over all single-row
        batches equals the exact gradient.

        Args:
        ----
            matern_spec (KernelSpec): Fixture with a 2D Matérn kernel.
            random_data (Dataset): Fixture with random 2D data.

        Asserts:
        -------
            Mean and sample estimates average to the dense gradients.
        """
        N = random_data.num_points
        K = gram(matern_spec, random_data.inputs, random_data.inputs)
        weights = np.random.default_rng(0).standard_normal(N)
        slot = make_sample_slot(matern_spec, random_data.inputs, 30, seed=1, index=0)
        mean_average = np.mean(
            [
                mean_grad_estimate(weights, random_data, matern_spec, [i])
                for i in range(N)
            ],
            axis=0,
        )
        sample_average = np.mean(
            [
                sample_grad_estimate(weights, slot, random_data, matern_spec, [i])
                for i in range(N)
            ],
            axis=0,
        )
        dense_mean = dense_mean_gradient(
            weights, K, random_data.targets, matern_spec.noise_variance
        )
        np.testing.assert_allclose(mean_average, dense_mean, rtol=1e-9, atol=1e-9)
        np.testing.assert_allclose(
            sample_average,
            dense_sample_gradient(weights, K, slot),
            rtol=1e-9,
            atol=1e-9,
        )

    def test_feature_regularizer_is_unbiased_on_average(
        self, se_spec: KernelSpec, toy_data: Dataset
    ) -> None:
        """
        Test the Fourier-feature regularizer against the exact one.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            Averaging over 200 feature maps approaches 2 K v.
        """
        weights = np.random.default_rng(2).standard_normal(toy_data.num_points)
        batch = np.arange(toy_data.num_points)
        exact = mean_grad_estimate(weights, toy_data, se_spec, batch)
        estimates = [
            mean_grad_estimate(
                weights, toy_data, se_spec, batch, sample_feature_map(se_spec, 200, s)
            )
            for s in range(200)
        ]
        error = np.linalg.norm(np.mean(estimates, axis=0) - exact)
        assert error < 0.05 * np.linalg.norm(exact)

    def test_empty_batch(self, se_spec: KernelSpec, toy_data: Dataset) -> None:
        """
        Test that an empty or out-of-range batch is rejected.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            ConfigurationError is raised.
        """
        weights = np.zeros(toy_data.num_points)
        with pytest.raises(ConfigurationError):
            mean_grad_estimate(weights, toy_data, se_spec, [])
        with pytest.raises(ConfigurationError):
            mean_grad_estimate(weights, toy_data, se_spec, [toy_data.num_points])

    def test_slot_must_match_dataset(
        self, se_spec: KernelSpec, toy_data: Dataset
    ) -> None:
        """
        Test that a slot built for other inputs is rejected.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            ConfigurationError is raised.
        """
        slot = make_sample_slot(se_spec, np.zeros((3, 1)), 10, seed=0, index=0)
        with pytest.raises(ConfigurationError, match="not initialised"):
            sample_grad_estimate(
                np.zeros(toy_data.num_points), slot, toy_data, se_spec, [0]
            )


class TestInducingObjectives:
    def test_anchors_at_the_data_recover_full_gradients(
        self, matern_spec: KernelSpec, random_data: Dataset
    ) -> None:
        """
        Test that z = x turns the inducing objectives into the full ones.

        Args:
        ----
            matern_spec (KernelSpec): Fixture with a 2D Matérn kernel.
            random_data (Dataset): Fixture with random 2D data.

        Asserts:
        -------
            Mean and sample estimates agree to 1e-8.
        """
        X = random_data.inputs
        batch = np.random.default_rng(5).integers(0, 32, size=12)
        weights = np.random.default_rng(6).standard_normal(32)
        slot = make_sample_slot(matern_spec, X, 40, seed=2, index=0)
        full_mean = mean_grad_estimate(weights, random_data, matern_spec, batch)
        inducing_mean = inducing_mean_grad_estimate(
            weights, X, random_data, matern_spec, batch
        )
        full_sample = sample_grad_estimate(
            weights, slot, random_data, matern_spec, batch
        )
        inducing_sample = inducing_sample_grad_estimate(
            weights, X, slot, random_data, matern_spec, batch
        )
        np.testing.assert_allclose(inducing_mean, full_mean, atol=1e-8)
        np.testing.assert_allclose(inducing_sample, full_sample, atol=1e-8)

    @pytest.mark.parametrize("family", list(KernelFamily))
    def test_closed_forms_are_stationary(self, family: KernelFamily) -> None:
        """
        Test the ridge-regression minimizers at M = 8, N = 64.

        Args:
        ----
            family (KernelFamily): Kernel family under test.

        Asserts:
        -------
            Dense gradients vanish at the closed-form solutions, which match
            a direct solve of the normal equations to 1e-6.
        """
        _, data, _ = _problem(7, 64, 2, family)
        spec = KernelSpec(family, 1.0, (0.3, 0.3), 0.1)
        anchors = data.inputs[:8]
        K_xz = gram(spec, data.inputs, anchors)
        K_zz = gram(spec, anchors, anchors)
        slot = make_sample_slot(spec, data.inputs, 50, seed=3, index=0)
        sigma2 = spec.noise_variance

        mean = inducing_closed_form(K_xz, K_zz, data.targets, sigma2)
        direct = np.linalg.solve(
            K_xz.T @ K_xz + sigma2 * K_zz, K_xz.T @ data.targets
        )
        np.testing.assert_allclose(mean, direct, rtol=1e-6, atol=1e-6)
        gradient = dense_inducing_mean_gradient(mean, K_xz, K_zz, data.targets, sigma2)
        assert np.max(np.abs(gradient)) < 1e-6

        sample = inducing_closed_form(K_xz, K_zz, slot.targets, sigma2)
        gradient = dense_inducing_sample_gradient(sample, K_xz, K_zz, slot)
        assert np.max(np.abs(gradient)) < 1e-6

    def test_full_closed_form(self, se_spec: KernelSpec, toy_data: Dataset) -> None:
        """
        Test that the full closed form zeroes the dense mean gradient.

        Args:
        ----
            se_spec (KernelSpec): Fixture with a 1D kernel.
            toy_data (Dataset): Fixture with the 1D toy problem.

        Asserts:
        -------
            The gradient at (K + σ²I)⁻¹y vanishes.
        """
        K = gram(se_spec, toy_data.inputs, toy_data.inputs)
        weights = representer_closed_form(K, toy_data.targets, se_spec.noise_variance)
        gradient = dense_mean_gradient(
            weights, K, toy_data.targets, se_spec.noise_variance
        )
        assert np.max(np.abs(gradient)) < 1e-8


class TestSamplingGradientCovariances:
    def test_shift_reduces_variance(self) -> None:
        """
        Test that moving the noise into the regularizer lowers the gradient
        covariance at initialization (N = 16, 20000 draws).

        Asserts:
        -------
            The covariance difference (old minus new) is positive
            semi-definite up to sampling error.
        """
        rng = np.random.default_rng(8)
        spec = KernelSpec(KernelFamily.SQUARED_EXPONENTIAL, 1.0, (0.3,), 2.0)
        old, new = sampling_gradient_covariances(
            spec, rng.random((16, 1)), num_draws=20_000, seed=1
        )
        eigenvalues = np.linalg.eigvalsh(old - new)
        assert eigenvalues.min() >= -0.02 * eigenvalues.max()
        assert np.trace(old) > np.trace(new)
