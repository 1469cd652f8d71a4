import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from django_pathwise_gp.constants.streams import STREAM_THOMPSON
from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import PathwiseGPError
from django_pathwise_gp.oracle.exact import fit_exact
from django_pathwise_gp.predict.ensemble import (
    PosteriorEnsemble,
    assemble,
    exact_models,
)
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.solvers.cg import (
    CgConfig,
    cg_posterior_mean,
    cg_sample_weights,
)
from django_pathwise_gp.solvers.objectives import (
    RepresenterModel,
    SampleSlot,
    init_sample_slots,
)
from django_pathwise_gp.solvers.sgd import SgdConfig, fit_mean_sgd, fit_samples_sgd
from django_pathwise_gp.thompson.acquisition import (
    maximize_acquisition,
    propose_candidates,
)
from django_pathwise_gp.thompson.config import Backend, ThompsonConfig
from django_pathwise_gp.thompson.target import TargetFunction, draw_target
from django_pathwise_gp.utils.random import derive_seed, make_rng

logger = logging.getLogger(__name__)

# Sub-streams of STREAM_THOMPSON; 0 and 1 belong to the target draw
_INITIAL_INPUTS = 2
_OBSERVATION_NOISE = 3
_CANDIDATES = 4
_SLOTS = 5
_SOLVER = 6
_RANDOM_SEARCH = 7


@dataclass(frozen=True)
class ThompsonStep:
    step: int
    max_value: float
    wall_time: float
    evaluations: int
    candidate_evaluations: int


@dataclass
class ThompsonTrace:
    """Progress of a Thompson sampling run; step 0 is the initial data.

    ``max_value`` is the running maximum of the noise-free target values at
    the evaluated points, so it never decreases.
    """

    config: ThompsonConfig
    records: List[ThompsonStep] = field(default_factory=list)

    def append(self, record: ThompsonStep) -> None:
        if self.records and record.max_value < self.records[-1].max_value:
            raise ValueError("Thompson trace maxima must be non-decreasing.")
        self.records.append(record)

    @property
    def final_max(self) -> float:
        return self.records[-1].max_value

    @property
    def evaluations(self) -> int:
        return self.records[-1].evaluations

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {
                "step": record.step,
                "max_value": record.max_value,
                "wall_time_s": record.wall_time,
                "evaluations": record.evaluations,
                "candidate_evaluations": record.candidate_evaluations,
            }
            for record in self.records
        ]


def _observe(
    target: TargetFunction, X: Array, cfg: ThompsonConfig, step: int
) -> Tuple[Array, Array]:
    values = target(X)
    rng = make_rng(cfg.seed, STREAM_THOMPSON, _OBSERVATION_NOISE, step)
    noise = np.sqrt(cfg.observation_noise) * rng.standard_normal(values.shape[0])
    return values, values + noise


def initial_data(
    cfg: ThompsonConfig, target: TargetFunction
) -> Tuple[Dataset, Array]:
    """Uniform initial inputs with their noisy observations and the noise-free
    target values."""
    rng = make_rng(cfg.seed, STREAM_THOMPSON, _INITIAL_INPUTS)
    X = rng.random((cfg.initial_points, cfg.dim))
    values, observed = _observe(target, X, cfg, 0)
    return Dataset(X, observed), values


def _pad(weights: Optional[Array], size: int) -> Optional[Array]:
    if weights is None:
        return None
    padding = size - weights.shape[-1]
    widths = [(0, 0)] * (weights.ndim - 1) + [(0, padding)]
    return np.pad(weights, widths)


class PosteriorRefresher:
    """Produces a posterior ensemble of ``cfg.batch_size`` samples after
    every data update, with the inference method ``cfg.backend``."""

    def __init__(self, cfg: ThompsonConfig) -> None:
        self.cfg = cfg
        self.spec = cfg.kernel
        self.slots: List[SampleSlot] = []
        self.mean_weights: Optional[Array] = None
        self.sample_weights: Optional[Array] = None

    def _slots(self, data: Dataset, step: int) -> Sequence[SampleSlot]:
        if self.cfg.warm_start and self.slots:
            known = self.slots[0].num_points
            self.slots = [slot.extend(data.inputs[known:]) for slot in self.slots]
        else:
            key = 0 if self.cfg.warm_start else step
            self.slots = init_sample_slots(
                self.spec,
                data.inputs,
                self.cfg.batch_size,
                self.cfg.num_features,
                derive_seed(self.cfg.seed, STREAM_THOMPSON, _SLOTS, key),
            )
        return self.slots

    def _sgd(
        self, data: Dataset, slots: Sequence[SampleSlot], step: int
    ) -> Tuple[RepresenterModel, RepresenterModel]:
        cfg = self.cfg
        seed = derive_seed(cfg.seed, STREAM_THOMPSON, _SOLVER, step)
        mean_start = sample_start = None
        if cfg.warm_start:
            mean_start = _pad(self.mean_weights, data.num_points)
            sample_start = _pad(self.sample_weights, data.num_points)
        mean_model, _ = fit_mean_sgd(
            data,
            self.spec,
            SgdConfig(
                steps=cfg.sgd_steps,
                learning_rate=cfg.mean_learning_rate,
                batch_size=cfg.sgd_batch_size,
                seed=seed,
            ),
            initial=mean_start,
        )
        sample_model, _ = fit_samples_sgd(
            data,
            self.spec,
            slots,
            SgdConfig(
                steps=cfg.sgd_steps,
                learning_rate=cfg.sample_learning_rate,
                batch_size=cfg.sgd_batch_size,
                seed=seed,
            ),
            initial=sample_start,
        )
        return mean_model, sample_model

    def __call__(self, data: Dataset, step: int) -> PosteriorEnsemble:
        slots = self._slots(data, step)
        if self.cfg.backend is Backend.EXACT:
            mean_model, sample_model = exact_models(fit_exact(self.spec, data), slots)
        elif self.cfg.backend is Backend.CG:
            cg_config = CgConfig(max_iters=self.cfg.cg_iters)
            mean_model, _ = cg_posterior_mean(self.spec, data, cg_config)
            sample_model, _ = cg_sample_weights(self.spec, data, slots, cg_config)
        else:
            mean_model, sample_model = self._sgd(data, slots, step)
        self.mean_weights = mean_model.mean_weights
        self.sample_weights = sample_model.sample_weights
        return assemble(mean_model, sample_model)


def acquire(
    ens: PosteriorEnsemble, data: Dataset, cfg: ThompsonConfig, step: int
) -> Tuple[Array, int]:
    """Maximize every posterior sample; returns the B maximizers and the
    number of candidate locations scored per sample."""
    rng = make_rng(cfg.seed, STREAM_THOMPSON, _CANDIDATES, step)
    candidates = propose_candidates(data, ens.sample_values, cfg, rng)

    def maximize(index: int) -> Array:
        location, _ = maximize_acquisition(
            lambda X: ens.sample_value(index, X),
            lambda X: ens.sample_gradient(index, X),
            candidates.locations[index],
            cfg.ascent_steps,
            cfg.ascent_learning_rate,
        )
        return location

    with ThreadPoolExecutor(max_workers=config.threads) as pool:
        locations = list(pool.map(maximize, range(ens.num_samples)))
    return np.vstack(locations), candidates.evaluated


def thompson_loop(
    cfg: ThompsonConfig, target: Optional[TargetFunction] = None
) -> ThompsonTrace:
    """Run parallel Thompson sampling against a GP-prior target.

    Each step refreshes the posterior on all observations, maximizes
    ``cfg.batch_size`` posterior samples, evaluates the target at the
    maximizers with observation noise and appends them to the data.

    Raises:
        PathwiseGPError: Backend failures, re-raised with the step number.

    """
    if cfg.backend is Backend.RANDOM:
        return random_search(cfg, target)
    target = target or draw_target(cfg.dim, cfg.kernel, cfg.num_features, cfg.seed)
    data, values = initial_data(cfg, target)
    trace = ThompsonTrace(cfg)
    best = float(np.max(values))
    trace.append(ThompsonStep(0, best, 0.0, target.evaluations, 0))
    refresh = PosteriorRefresher(cfg)
    started = time.perf_counter()

    for step in range(1, cfg.steps + 1):
        try:
            ens = refresh(data, step)
            locations, scored = acquire(ens, data, cfg, step)
        except PathwiseGPError as error:
            error.args = (f"Thompson step {step}: {error}",)
            raise
        new_values, observed = _observe(target, locations, cfg, step)
        data = data.append(locations, observed)
        best = max(best, float(np.max(new_values)))
        trace.append(
            ThompsonStep(
                step,
                best,
                time.perf_counter() - started,
                target.evaluations,
                scored * ens.num_samples,
            )
        )
        logger.info(
            "Thompson step %d/%d: max %.6g over %d evaluations",
            step,
            cfg.steps,
            best,
            target.evaluations,
        )
    return trace


def random_search(
    cfg: ThompsonConfig, target: Optional[TargetFunction] = None
) -> ThompsonTrace:
    """Uniform random search with the same target, initial data and budget
    as :func:`thompson_loop`."""
    target = target or draw_target(cfg.dim, cfg.kernel, cfg.num_features, cfg.seed)
    _, values = initial_data(cfg, target)
    trace = ThompsonTrace(cfg)
    best = float(np.max(values))
    trace.append(ThompsonStep(0, best, 0.0, target.evaluations, 0))
    started = time.perf_counter()
    for step in range(1, cfg.steps + 1):
        rng = make_rng(cfg.seed, STREAM_THOMPSON, _RANDOM_SEARCH, step)
        locations = rng.random((cfg.batch_size, cfg.dim))
        new_values, _ = _observe(target, locations, cfg, step)
        best = max(best, float(np.max(new_values)))
        trace.append(
            ThompsonStep(
                step, best, time.perf_counter() - started, target.evaluations, 0
            )
        )
    return trace
