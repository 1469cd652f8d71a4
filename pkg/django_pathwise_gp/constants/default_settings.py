from dataclasses import dataclass


@dataclass(frozen=True)
class DefaultFeatureSettings:
    prior_features: int = 2000
    regularizer_features: int = 100


# pylint: disable=too-many-instance-attributes
@dataclass(frozen=True)
class DefaultSgdSettings:
    mean_learning_rate: float = 0.5
    sample_learning_rate: float = 0.1
    momentum: float = 0.9
    batch_size: int = 512
    steps: int = 100_000
    polyak_averaging: bool = True
    divergence_threshold: float = 1e8
    trace_every: int = 1000


@dataclass(frozen=True)
class DefaultCgSettings:
    max_iters: int = 1000
    tolerance: float = 0.01
    preconditioner_rank: int = 100


@dataclass(frozen=True)
class DefaultOracleSettings:
    max_points: int = 4096
    jitter: float = 1e-10
    dense_kernel_max_points: int = 4096
    inducing_exact_max_points: int = 4096
    eigenvalue_floor: float = 1e-12
    diagnostic_samples: int = 1000


# pylint: disable=too-many-instance-attributes
@dataclass(frozen=True)
class DefaultThompsonSettings:
    mean_learning_rate: float = 0.3
    sample_learning_rate: float = 0.0003
    uniform_fraction: float = 0.1
    candidates_per_round: int = 2000
    rounds: int = 5
    top_k: int = 1
    ascent_steps: int = 100
    ascent_learning_rate: float = 0.001
    observation_noise: float = 1e-6


@dataclass(frozen=True)
class DefaultRuntimeSettings:
    threads: int = 1
    output_dir: str = "gp_output"
    format_version: int = 1
