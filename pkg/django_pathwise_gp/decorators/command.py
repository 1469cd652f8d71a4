import logging
from functools import wraps
from typing import Any, Callable

from django.core.management.base import CommandError
from rest_framework.exceptions import ParseError, ValidationError

from django_pathwise_gp.exceptions import (
    ConfigurationError,
    DataError,
    NumericalError,
)
from django_pathwise_gp.utils.serialization import flatten_errors

logger = logging.getLogger(__name__)

EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def handle_pathwise_errors(func: Callable) -> Callable:
    """Translate library errors raised by a management command's ``handle``
    into :class:`CommandError` with the matching exit code.

    Invalid configurations and data exit with code 2, numerical breakdowns
    with code 3. Validation errors are reported one field path per line.

    Args:
        func (Callable): The ``handle`` method to wrap.

    Returns:
        Callable: The wrapped method.

    """

    @wraps(func)
    def wrapped_func(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except ValidationError as e:
            lines = flatten_errors(e.detail)
            raise CommandError(
                "Invalid configuration:\n  " + "\n  ".join(lines),
                returncode=EXIT_CONFIG_ERROR,
            ) from e
        except ParseError as e:
            raise CommandError(
                f"Configuration is not valid JSON: {e.detail}",
                returncode=EXIT_CONFIG_ERROR,
            ) from e
        except (ConfigurationError, DataError) as e:
            raise CommandError(str(e), returncode=EXIT_CONFIG_ERROR) from e
        except NumericalError as e:
            logger.error("Numerical failure: %s", e)
            raise CommandError(
                f"{type(e).__name__}: {e}", returncode=EXIT_NUMERICAL_ERROR
            ) from e

    return wrapped_func
