import sys

import pytest

from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelFamily
from django_pathwise_gp.thompson.config import Backend, ThompsonConfig
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.thompson,
    pytest.mark.thompson_config,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


class TestThompsonConfig:
    def test_defaults(self) -> None:
        """
        Test the defaults taken from the settings.

        Asserts:
        -------
            Candidate and feature counts follow the configured settings and
            enum fields accept their string values.
        """
        cfg = ThompsonConfig(backend="sgd", family="squared_exponential")
        assert cfg.backend is Backend.SGD
        assert cfg.family is KernelFamily.SQUARED_EXPONENTIAL
        assert cfg.candidates_per_round == 2000
        assert cfg.num_features == 1000
        assert cfg.exploit_fraction == pytest.approx(0.9)

    def test_kernel_and_budget(self) -> None:
        """
        Test the derived kernel and evaluation budget.

        Asserts:
        -------
            The kernel is isotropic in ``dim`` dimensions and the budget
            counts the initial points plus one batch per step.
        """
        cfg = ThompsonConfig(dim=3, lengthscale=0.2, batch_size=5, steps=4)
        assert cfg.kernel.lengthscales == (0.2, 0.2, 0.2)
        assert cfg.kernel.noise_variance == cfg.noise_variance
        assert cfg.evaluation_budget == 500 + 20

    @pytest.mark.parametrize(
        "overrides",
        [
            {"steps": 0},
            {"top_k": 0},
            {"num_features": 7},
            {"uniform_fraction": 1.5},
            {"lengthscale": 0.0},
            {"observation_noise": -1.0},
            {"backend": "gradient"},
        ],
    )
    def test_invalid(self, overrides) -> None:
        """
        Test rejection of invalid settings.

        Args:
        ----
            overrides (dict): One invalid field.

        Asserts:
        -------
            ConfigurationError, or ValueError for an unknown backend.
        """
        with pytest.raises((ConfigurationError, ValueError)):
            ThompsonConfig(**overrides)
