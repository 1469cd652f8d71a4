import sys

import pytest

from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON
from django_pathwise_gp.validators.config_validators import (
    validate_boolean_setting,
    validate_even_feature_count,
    validate_positive_integer,
    validate_positive_number,
    validate_string_setting,
    validate_unit_interval,
)

pytestmark = [
    pytest.mark.validators,
    pytest.mark.config_validators,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


class TestValidateBooleanSetting:
    def test_valid_boolean(self) -> None:
        """
        Test that a boolean passes.

        Asserts:
        -------
            No errors are returned.
        """
        assert not validate_boolean_setting(True, "FLAG")

    def test_invalid_boolean(self) -> None:
        """
        Test that a non-boolean is rejected.

        Asserts:
        -------
            One error with id E001.
        """
        errors = validate_boolean_setting("true", "FLAG")  # type: ignore
        assert len(errors) == 1
        assert errors[0].id == "django_pathwise_gp.E001_FLAG"


class TestValidatePositiveNumber:
    @pytest.mark.parametrize("value", [1, 0.5, 1e-12])
    def test_valid(self, value: float) -> None:
        """
        Test that positive ints and floats pass.

        Args:
        ----
            value (float): A positive number.

        Asserts:
        -------
            No errors are returned.
        """
        assert not validate_positive_number(value, "RATE")

    def test_not_a_number(self) -> None:
        """
        Test that strings and booleans are not numbers.

        Asserts:
        -------
            Both produce the E002 error.
        """
        expected = "django_pathwise_gp.E002_RATE"
        assert validate_positive_number("1", "RATE")[0].id == expected
        assert validate_positive_number(True, "RATE")[0].id == expected

    def test_not_positive(self) -> None:
        """
        Test that zero is rejected.

        Asserts:
        -------
            The E003 error is returned.
        """
        errors = validate_positive_number(0, "RATE")
        assert errors[0].id == "django_pathwise_gp.E003_RATE"


class TestValidatePositiveInteger:
    def test_valid_and_invalid(self) -> None:
        """
        Test integers against floats and non-positive values.

        Asserts:
        -------
            Positive ints pass; floats give E004; zero gives E005.
        """
        assert not validate_positive_integer(3, "COUNT")
        assert validate_positive_integer(3.0, "COUNT")[0].id.startswith(
            "django_pathwise_gp.E004"
        )
        assert validate_positive_integer(0, "COUNT")[0].id.startswith(
            "django_pathwise_gp.E005"
        )


class TestValidateUnitInterval:
    def test_half_open_interval(self) -> None:
        """
        Test the default [0, 1) range.

        Asserts:
        -------
            0 passes, 1 and negative values fail with E006.
        """
        assert not validate_unit_interval(0.0, "MOMENTUM")
        assert validate_unit_interval(1.0, "MOMENTUM")[0].id.startswith(
            "django_pathwise_gp.E006"
        )
        assert validate_unit_interval(-0.1, "MOMENTUM")

    def test_closed_interval(self) -> None:
        """
        Test that ``include_one`` accepts 1.

        Asserts:
        -------
            1 passes, 1.5 fails.
        """
        assert not validate_unit_interval(1.0, "FRACTION", include_one=True)
        assert validate_unit_interval(1.5, "FRACTION", include_one=True)


class TestValidateEvenFeatureCount:
    def test_even_and_odd(self) -> None:
        """
        Test that feature counts must be positive even integers.

        Asserts:
        -------
            Even counts pass, odd counts give E007, zero gives E005.
        """
        assert not validate_even_feature_count(2000, "FEATURES")
        assert validate_even_feature_count(7, "FEATURES")[0].id == (
            "django_pathwise_gp.E007_FEATURES"
        )
        assert validate_even_feature_count(0, "FEATURES")[0].id == (
            "django_pathwise_gp.E005_FEATURES"
        )


class TestValidateStringSetting:
    def test_string(self) -> None:
        """
        Test that only non-empty strings pass.

        Asserts:
        -------
            "out" passes; "" and None give E008.
        """
        assert not validate_string_setting("out", "DIR")
        expected = "django_pathwise_gp.E008_DIR"
        assert validate_string_setting("", "DIR")[0].id == expected
        assert validate_string_setting(None, "DIR")
