from typing import Any, List

from django.core.checks import Error, register

from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.validators.config_validators import (
    validate_boolean_setting,
    validate_even_feature_count,
    validate_positive_integer,
    validate_positive_number,
    validate_string_setting,
    validate_unit_interval,
)


@register()
def check_pathwise_gp_settings(app_configs: Any, **kwargs: Any) -> List[Error]:
    """Check and validate the pathwise GP settings in the Django
    configuration.

    Parameters:
    -----------
    app_configs : Any
        Passed by Django during checks (not used here).

    kwargs : Any
        Additional keyword arguments for flexibility.

    Returns:
    --------
    List[Error]
        A list of `Error` objects for any detected configuration issues.

    """
    errors: List[Error] = []

    # Fourier features
    errors.extend(
        validate_even_feature_count(
            config.prior_features, f"{config.prefix}PRIOR_FEATURES"
        )
    )
    errors.extend(
        validate_even_feature_count(
            config.regularizer_features, f"{config.prefix}REGULARIZER_FEATURES"
        )
    )

    # SGD
    for name in (
        "mean_learning_rate",
        "sample_learning_rate",
        "divergence_threshold",
        "thompson_mean_learning_rate",
        "thompson_sample_learning_rate",
        "thompson_ascent_learning_rate",
        "thompson_observation_noise",
        "cg_tolerance",
        "jitter",
        "eigenvalue_floor",
    ):
        errors.extend(
            validate_positive_number(
                getattr(config, name), f"{config.prefix}{name.upper()}"
            )
        )
    errors.extend(
        validate_unit_interval(config.momentum, f"{config.prefix}MOMENTUM")
    )
    errors.extend(
        validate_boolean_setting(
            config.polyak_averaging, f"{config.prefix}POLYAK_AVERAGING"
        )
    )

    for name in (
        "batch_size",
        "steps",
        "trace_every",
        "cg_max_iters",
        "oracle_max_points",
        "dense_kernel_max_points",
        "inducing_exact_max_points",
        "diagnostic_samples",
        "thompson_candidates_per_round",
        "thompson_rounds",
        "thompson_top_k",
        "thompson_ascent_steps",
        "threads",
        "format_version",
    ):
        errors.extend(
            validate_positive_integer(
                getattr(config, name), f"{config.prefix}{name.upper()}"
            )
        )

    # rank 0 disables preconditioning
    if config.cg_preconditioner_rank != 0:
        errors.extend(
            validate_positive_integer(
                config.cg_preconditioner_rank,
                f"{config.prefix}CG_PRECONDITIONER_RANK",
            )
        )

    errors.extend(
        validate_unit_interval(
            config.thompson_uniform_fraction,
            f"{config.prefix}THOMPSON_UNIFORM_FRACTION",
            include_one=True,
        )
    )
    errors.extend(
        validate_string_setting(config.output_dir, f"{config.prefix}OUTPUT_DIR")
    )

    return errors
