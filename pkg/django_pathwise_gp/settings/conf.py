from typing import Any

from django.conf import settings

from django_pathwise_gp.constants.default_settings import (
    DefaultCgSettings,
    DefaultFeatureSettings,
    DefaultOracleSettings,
    DefaultRuntimeSettings,
    DefaultSgdSettings,
    DefaultThompsonSettings,
)


# pylint: disable=too-many-instance-attributes
class PathwiseGPConfig:
    """A configuration handler for the pathwise GP library, allowing settings
    to be loaded from Django settings with defaults provided through the
    ``Default*Settings`` dataclasses.

    Attributes:
        prior_features (int): Fourier features per prior function draw.
        regularizer_features (int): Fourier features redrawn per SGD step.
        mean_learning_rate (float): Default SGD step size for mean weights.
        sample_learning_rate (float): Default SGD step size for sample weights.
        momentum (float): Nesterov momentum coefficient.
        batch_size (int): Minibatch size.
        steps (int): Default number of SGD steps.
        polyak_averaging (bool): Whether SGD reports averaged iterates.
        divergence_threshold (float): Weight norm above which SGD aborts.
        trace_every (int): SGD checkpoint cadence in steps.
        cg_max_iters (int): Conjugate-gradient iteration budget.
        cg_tolerance (float): Conjugate-gradient relative residual tolerance.
        cg_preconditioner_rank (int): Pivoted Cholesky preconditioner rank.
        oracle_max_points (int): Largest N accepted by dense exact routines.
        jitter (float): Relative diagonal jitter for the Cholesky retry.
        dense_kernel_max_points (int): Largest N for which SGD caches K_xx.
        inducing_exact_max_points (int): Largest M with exact K_zz regularizer.
        eigenvalue_floor (float): Relative floor for spectral basis functions.
        diagnostic_samples (int): Posterior samples used by diagnostics.
        threads (int): Worker threads for parallel sample optimisation.
        output_dir (str): Default output directory of the commands.
        format_version (int): Version tag written to and expected in configs.

    """

    prefix = "DJANGO_PATHWISE_GP_"

    default_feature_settings: DefaultFeatureSettings = DefaultFeatureSettings()
    default_sgd_settings: DefaultSgdSettings = DefaultSgdSettings()
    default_cg_settings: DefaultCgSettings = DefaultCgSettings()
    default_oracle_settings: DefaultOracleSettings = DefaultOracleSettings()
    default_thompson_settings: DefaultThompsonSettings = DefaultThompsonSettings()
    default_runtime_settings: DefaultRuntimeSettings = DefaultRuntimeSettings()

    def __init__(self) -> None:
        """Initialize the PathwiseGPConfig, loading values from Django
        settings or falling back to the defaults."""
        self.prior_features: int = self.get_setting(
            f"{self.prefix}PRIOR_FEATURES",
            self.default_feature_settings.prior_features,
        )
        self.regularizer_features: int = self.get_setting(
            f"{self.prefix}REGULARIZER_FEATURES",
            self.default_feature_settings.regularizer_features,
        )

        self.mean_learning_rate: float = self.get_setting(
            f"{self.prefix}MEAN_LEARNING_RATE",
            self.default_sgd_settings.mean_learning_rate,
        )
        self.sample_learning_rate: float = self.get_setting(
            f"{self.prefix}SAMPLE_LEARNING_RATE",
            self.default_sgd_settings.sample_learning_rate,
        )
        self.momentum: float = self.get_setting(
            f"{self.prefix}MOMENTUM", self.default_sgd_settings.momentum
        )
        self.batch_size: int = self.get_setting(
            f"{self.prefix}BATCH_SIZE", self.default_sgd_settings.batch_size
        )
        self.steps: int = self.get_setting(
            f"{self.prefix}STEPS", self.default_sgd_settings.steps
        )
        self.polyak_averaging: bool = self.get_setting(
            f"{self.prefix}POLYAK_AVERAGING",
            self.default_sgd_settings.polyak_averaging,
        )
        self.divergence_threshold: float = self.get_setting(
            f"{self.prefix}DIVERGENCE_THRESHOLD",
            self.default_sgd_settings.divergence_threshold,
        )
        self.trace_every: int = self.get_setting(
            f"{self.prefix}TRACE_EVERY", self.default_sgd_settings.trace_every
        )

        self.cg_max_iters: int = self.get_setting(
            f"{self.prefix}CG_MAX_ITERS", self.default_cg_settings.max_iters
        )
        self.cg_tolerance: float = self.get_setting(
            f"{self.prefix}CG_TOLERANCE", self.default_cg_settings.tolerance
        )
        self.cg_preconditioner_rank: int = self.get_setting(
            f"{self.prefix}CG_PRECONDITIONER_RANK",
            self.default_cg_settings.preconditioner_rank,
        )

        self.oracle_max_points: int = self.get_setting(
            f"{self.prefix}ORACLE_MAX_POINTS",
            self.default_oracle_settings.max_points,
        )
        self.jitter: float = self.get_setting(
            f"{self.prefix}JITTER", self.default_oracle_settings.jitter
        )
        self.dense_kernel_max_points: int = self.get_setting(
            f"{self.prefix}DENSE_KERNEL_MAX_POINTS",
            self.default_oracle_settings.dense_kernel_max_points,
        )
        self.inducing_exact_max_points: int = self.get_setting(
            f"{self.prefix}INDUCING_EXACT_MAX_POINTS",
            self.default_oracle_settings.inducing_exact_max_points,
        )
        self.eigenvalue_floor: float = self.get_setting(
            f"{self.prefix}EIGENVALUE_FLOOR",
            self.default_oracle_settings.eigenvalue_floor,
        )
        self.diagnostic_samples: int = self.get_setting(
            f"{self.prefix}DIAGNOSTIC_SAMPLES",
            self.default_oracle_settings.diagnostic_samples,
        )

        self.thompson_mean_learning_rate: float = self.get_setting(
            f"{self.prefix}THOMPSON_MEAN_LEARNING_RATE",
            self.default_thompson_settings.mean_learning_rate,
        )
        self.thompson_sample_learning_rate: float = self.get_setting(
            f"{self.prefix}THOMPSON_SAMPLE_LEARNING_RATE",
            self.default_thompson_settings.sample_learning_rate,
        )
        self.thompson_uniform_fraction: float = self.get_setting(
            f"{self.prefix}THOMPSON_UNIFORM_FRACTION",
            self.default_thompson_settings.uniform_fraction,
        )
        self.thompson_candidates_per_round: int = self.get_setting(
            f"{self.prefix}THOMPSON_CANDIDATES_PER_ROUND",
            self.default_thompson_settings.candidates_per_round,
        )
        self.thompson_rounds: int = self.get_setting(
            f"{self.prefix}THOMPSON_ROUNDS", self.default_thompson_settings.rounds
        )
        self.thompson_top_k: int = self.get_setting(
            f"{self.prefix}THOMPSON_TOP_K", self.default_thompson_settings.top_k
        )
        self.thompson_ascent_steps: int = self.get_setting(
            f"{self.prefix}THOMPSON_ASCENT_STEPS",
            self.default_thompson_settings.ascent_steps,
        )
        self.thompson_ascent_learning_rate: float = self.get_setting(
            f"{self.prefix}THOMPSON_ASCENT_LEARNING_RATE",
            self.default_thompson_settings.ascent_learning_rate,
        )
        self.thompson_observation_noise: float = self.get_setting(
            f"{self.prefix}THOMPSON_OBSERVATION_NOISE",
            self.default_thompson_settings.observation_noise,
        )

        self.threads: int = self.get_setting(
            f"{self.prefix}THREADS", self.default_runtime_settings.threads
        )
        self.output_dir: str = self.get_setting(
            f"{self.prefix}OUTPUT_DIR", self.default_runtime_settings.output_dir
        )
        self.format_version: int = self.get_setting(
            f"{self.prefix}FORMAT_VERSION",
            self.default_runtime_settings.format_version,
        )

    def get_setting(self, setting_name: str, default_value: Any) -> Any:
        """Retrieve a setting from Django settings with a default fallback.

        Plain library use (no configured Django settings) gets the default.

        Args:
            setting_name (str): The name of the setting to retrieve.
            default_value (Any): The value returned when the setting is absent.

        Returns:
            Any: The value of the setting or the default value if not found.

        """
        if not settings.configured:
            return default_value
        return getattr(settings, setting_name, default_value)


config = PathwiseGPConfig()
