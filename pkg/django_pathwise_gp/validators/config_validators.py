from numbers import Real
from typing import Any, List

from django.core.checks import Error


def _is_number(value: Any) -> bool:
    return isinstance(value, Real) and not isinstance(value, bool)


def _is_integer(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def validate_boolean_setting(value: bool, config_name: str) -> List[Error]:
    errors: List[Error] = []
    if not isinstance(value, bool):
        errors.append(
            Error(
                f"{config_name} is not a boolean.",
                hint=f"Ensure {config_name} is either True or False.",
                id=f"django_pathwise_gp.E001_{config_name}",
            )
        )
    return errors


def validate_positive_number(value: Any, config_name: str) -> List[Error]:
    errors: List[Error] = []
    if not _is_number(value):
        errors.append(
            Error(
                f"{config_name} is not a number.",
                hint=f"Ensure {config_name} is an int or float.",
                id=f"django_pathwise_gp.E002_{config_name}",
            )
        )
    elif not value > 0:
        errors.append(
            Error(
                f"{config_name} must be strictly positive, got {value}.",
                hint=f"Ensure {config_name} is greater than zero.",
                id=f"django_pathwise_gp.E003_{config_name}",
            )
        )
    return errors


def validate_positive_integer(value: Any, config_name: str) -> List[Error]:
    errors: List[Error] = []
    if not _is_integer(value):
        errors.append(
            Error(
                f"{config_name} is not an integer.",
                hint=f"Ensure {config_name} is a whole number.",
                id=f"django_pathwise_gp.E004_{config_name}",
            )
        )
    elif value < 1:
        errors.append(
            Error(
                f"{config_name} must be at least 1, got {value}.",
                hint=f"Ensure {config_name} is a positive integer.",
                id=f"django_pathwise_gp.E005_{config_name}",
            )
        )
    return errors


def validate_unit_interval(
    value: Any, config_name: str, include_one: bool = False
) -> List[Error]:
    """Validate that a setting lies in [0, 1) (or [0, 1] when
    ``include_one``).

    Args:
        value (Any): The value to validate, e.g. a momentum coefficient.
        config_name (str): The name of the setting being validated.
        include_one (bool): Whether 1 itself is accepted.

    Returns:
        List[Error]: Errors if the value is out of range, otherwise empty.

    """
    errors: List[Error] = []
    if not _is_number(value):
        errors.append(
            Error(
                f"{config_name} is not a number.",
                hint=f"Ensure {config_name} is an int or float.",
                id=f"django_pathwise_gp.E002_{config_name}",
            )
        )
        return errors

    upper_ok = value <= 1 if include_one else value < 1
    if value < 0 or not upper_ok:
        bracket = "]" if include_one else ")"
        errors.append(
            Error(
                f"{config_name} must lie in [0, 1{bracket}, got {value}.",
                id=f"django_pathwise_gp.E006_{config_name}",
            )
        )
    return errors


def validate_even_feature_count(value: Any, config_name: str) -> List[Error]:
    """Validate a Fourier feature count: a positive even integer, because
    features come in cosine/sine pairs sharing one frequency."""
    errors = validate_positive_integer(value, config_name)
    if errors:
        return errors

    if value % 2:
        errors.append(
            Error(
                f"{config_name} must be even, got {value}.",
                hint="Fourier features are drawn in cos/sin pairs.",
                id=f"django_pathwise_gp.E007_{config_name}",
            )
        )
    return errors


def validate_string_setting(value: Any, config_name: str) -> List[Error]:
    errors: List[Error] = []
    if not isinstance(value, str) or not value:
        errors.append(
            Error(
                f"{config_name} must be a non-empty string.",
                id=f"django_pathwise_gp.E008_{config_name}",
            )
        )
    return errors
