from dataclasses import dataclass, field
from enum import Enum

from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelFamily, KernelSpec
from django_pathwise_gp.settings.conf import config


class Backend(str, Enum):
    EXACT = "exact"
    SGD = "sgd"
    CG = "cg"
    RANDOM = "random"


# pylint: disable=too-many-instance-attributes
@dataclass(frozen=True)
class ThompsonConfig:
    """Parameters of one parallel Thompson sampling run on [0, 1]^d.

    Attributes:
        dim (int): Search-space dimension d.
        lengthscale (float): Shared lengthscale of the target and the model.
        batch_size (int): Posterior samples maximized, and points acquired,
            per step.
        steps (int): Number of Thompson steps.
        initial_points (int): Uniformly drawn points observed before step 1.
        uniform_fraction (float): Share of candidate locations drawn
            uniformly; the rest perturb resampled training inputs.
        candidates_per_round (int): Candidate locations per round.
        rounds (int): Candidate rounds per step.
        top_k (int): Best candidates kept as ascent starts for every sample.
        ascent_steps (int): Adam steps per start.
        ascent_learning_rate (float): Adam step size.
        observation_noise (float): Variance of the noise added to target
            evaluations.
        noise_variance (float): σ² assumed by the model.
        signal_variance (float): σ_f² of the target and the model.
        family (KernelFamily): Kernel of the target and the model.
        num_features (int): Fourier features of the target and of every
            prior draw.
        backend (Backend): Inference method for the posterior samples.
        warm_start (bool): Keep sample slots across steps and start each
            solve from the previous weights (new points get zero weight);
            otherwise every step draws fresh slots and solves from zero.
        sgd_steps (int): SGD steps per Thompson step.
        sgd_batch_size (int): SGD minibatch size.
        mean_learning_rate (float): SGD step size for the mean weights.
        sample_learning_rate (float): SGD step size for the sample weights.
        cg_iters (int): CG iteration budget per solve.
        seed (int): Root seed of the run.

    """

    dim: int = 2
    lengthscale: float = 0.3
    batch_size: int = 20
    steps: int = 10
    initial_points: int = 500
    uniform_fraction: float = field(
        default_factory=lambda: config.thompson_uniform_fraction
    )
    candidates_per_round: int = field(
        default_factory=lambda: config.thompson_candidates_per_round
    )
    rounds: int = field(default_factory=lambda: config.thompson_rounds)
    top_k: int = field(default_factory=lambda: config.thompson_top_k)
    ascent_steps: int = field(default_factory=lambda: config.thompson_ascent_steps)
    ascent_learning_rate: float = field(
        default_factory=lambda: config.thompson_ascent_learning_rate
    )
    observation_noise: float = field(
        default_factory=lambda: config.thompson_observation_noise
    )
    noise_variance: float = field(
        default_factory=lambda: config.thompson_observation_noise
    )
    signal_variance: float = 1.0
    family: KernelFamily = KernelFamily.MATERN32
    num_features: int = field(default_factory=lambda: config.prior_features)
    backend: Backend = Backend.EXACT
    warm_start: bool = True
    sgd_steps: int = 1000
    sgd_batch_size: int = field(default_factory=lambda: config.batch_size)
    mean_learning_rate: float = field(
        default_factory=lambda: config.thompson_mean_learning_rate
    )
    sample_learning_rate: float = field(
        default_factory=lambda: config.thompson_sample_learning_rate
    )
    cg_iters: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "backend", Backend(self.backend))
        object.__setattr__(self, "family", KernelFamily(self.family))
        counts = {
            "dim": self.dim,
            "batch_size": self.batch_size,
            "steps": self.steps,
            "initial_points": self.initial_points,
            "candidates_per_round": self.candidates_per_round,
            "rounds": self.rounds,
            "top_k": self.top_k,
            "ascent_steps": self.ascent_steps,
            "num_features": self.num_features,
            "sgd_steps": self.sgd_steps,
            "sgd_batch_size": self.sgd_batch_size,
            "cg_iters": self.cg_iters,
        }
        for name, value in counts.items():
            if value < 1:
                raise ConfigurationError(f"{name} must be at least 1, got {value}.")
        if not 0.0 <= self.uniform_fraction <= 1.0:
            raise ConfigurationError(
                f"uniform_fraction must lie in [0, 1], got {self.uniform_fraction}."
            )
        if self.num_features % 2:
            raise ConfigurationError(
                f"num_features must be even, got {self.num_features}."
            )
        for name in (
            "lengthscale",
            "ascent_learning_rate",
            "noise_variance",
            "signal_variance",
            "mean_learning_rate",
            "sample_learning_rate",
        ):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive.")
        if self.observation_noise < 0:
            raise ConfigurationError("observation_noise must be non-negative.")

    @property
    def exploit_fraction(self) -> float:
        return 1.0 - self.uniform_fraction

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec.isotropic(
            self.family,
            self.dim,
            self.lengthscale,
            signal_variance=self.signal_variance,
            noise_variance=self.noise_variance,
        )

    @property
    def evaluation_budget(self) -> int:
        return self.initial_points + self.batch_size * self.steps
