import sys

import pytest
from django.core.management.base import CommandError
from rest_framework.exceptions import ParseError, ValidationError

from django_pathwise_gp.decorators import handle_pathwise_errors
from django_pathwise_gp.decorators.command import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_ERROR,
)
from django_pathwise_gp.exceptions import (
    CholeskyError,
    ConfigurationError,
    DataError,
    DivergenceError,
)
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.decorators,
    pytest.mark.decorators_command,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


def _raising(error: Exception):
    @handle_pathwise_errors
    def handle() -> None:
        raise error

    return handle


class TestHandlePathwiseErrors:
    def test_passes_results_through(self) -> None:
        """
        Test that successful calls are untouched.

        Asserts:
        -------
            The return value is passed through.
        """
        assert handle_pathwise_errors(lambda: 5)() == 5

    @pytest.mark.parametrize(
        "error",
        [
            ConfigurationError("odd feature count"),
            DataError("missing file"),
            ParseError("bad json"),
            ValidationError({"kernel": {"lengthscales": ["This field is required."]}}),
        ],
    )
    def test_configuration_errors(self, error: Exception) -> None:
        """
        Test the exit code of invalid configurations and data.

        Args:
        ----
            error (Exception): The raised error.

        Asserts:
        -------
            CommandError with exit code 2.
        """
        with pytest.raises(CommandError) as info:
            _raising(error)()
        assert info.value.returncode == EXIT_CONFIG_ERROR == 2

    def test_validation_paths(self) -> None:
        """
        Test that validation errors list their field paths.

        Asserts:
        -------
            The message names the dotted path of the failing field.
        """
        error = ValidationError(
            {"kernel": {"lengthscales": ["This field is required."]}}
        )
        with pytest.raises(CommandError, match="kernel.lengthscales: This field"):
            _raising(error)()

    @pytest.mark.parametrize(
        "error",
        [
            CholeskyError("not positive definite", 3, -1e-3),
            DivergenceError("diverged", 10, float("inf")),
        ],
    )
    def test_numerical_errors(self, error: Exception) -> None:
        """
        Test the exit code of numerical breakdowns.

        Args:
        ----
            error (Exception): The raised error.

        Asserts:
        -------
            CommandError with exit code 3 naming the error type.
        """
        with pytest.raises(CommandError, match=type(error).__name__) as info:
            _raising(error)()
        assert info.value.returncode == EXIT_NUMERICAL_ERROR == 3
