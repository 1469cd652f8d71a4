"""Maximization of sampled acquisition functions.

A step of parallel Thompson sampling maximizes every posterior sample in
three stages: score shared candidate locations (uniform exploration plus
perturbed resamples of good observations), keep the best candidates of each
sample, then refine them by box-constrained Adam ascent.
"""

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.exceptions import DataError
from django_pathwise_gp.thompson.config import ThompsonConfig

ValueFn = Callable[[Array], Array]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


def exploit_weights(targets: Array) -> Array:
    """Resampling probabilities proportional to y − min(y); uniform when all
    observations are equal."""
    shifted = np.asarray(targets, dtype=np.float64) - np.min(targets)
    total = shifted.sum()
    if total <= 0:
        return np.full(shifted.shape[0], 1.0 / shifted.shape[0])
    return shifted / total


def draw_candidates(
    data: Dataset, cfg: ThompsonConfig, rng: np.random.Generator
) -> Array:
    """One round of candidate locations, clipped to the unit box."""
    count = cfg.candidates_per_round
    uniform = int(round(cfg.uniform_fraction * count))
    exploit = count - uniform
    chosen = rng.choice(data.num_points, size=exploit, p=exploit_weights(data.targets))
    perturbed = data.inputs[chosen] + rng.normal(
        0.0, cfg.lengthscale / 2.0, size=(exploit, data.dim)
    )
    explored = rng.random((uniform, data.dim))
    return np.clip(np.vstack([perturbed, explored]), 0.0, 1.0)


@dataclass(frozen=True)
class Candidates:
    """Best candidate locations per sample.

    Attributes:
        locations (np.ndarray): Shape (S, k, d), best first.
        values (np.ndarray): Acquisition values, shape (S, k).
        evaluated (int): Candidate locations scored per sample.

    """

    locations: Array
    values: Array
    evaluated: int


def propose_candidates(
    data: Dataset,
    acquisition: ValueFn,
    cfg: ThompsonConfig,
    rng: np.random.Generator,
) -> Candidates:
    """Score ``cfg.rounds`` rounds of shared candidates under every sample and
    keep each sample's ``cfg.top_k`` best.

    Args:
        data (Dataset): Observations so far, inputs inside [0, 1]^d.
        acquisition: Maps an (n, d) array to sample values of shape (S, n),
            or (n,) for a single sample.
        cfg (ThompsonConfig): Candidate counts and fractions.
        rng (np.random.Generator): Source of the candidate locations.

    """
    if data.num_points == 0:
        raise DataError("Candidate proposal needs at least one observation.")
    best_locations = None
    best_values = None
    for _ in range(cfg.rounds):
        candidates = draw_candidates(data, cfg, rng)
        values = np.atleast_2d(acquisition(candidates))
        locations = np.broadcast_to(candidates, (values.shape[0],) + candidates.shape)
        if best_values is not None:
            values = np.hstack([best_values, values])
            locations = np.concatenate([best_locations, locations], axis=1)
        order = np.argsort(-values, axis=1, kind="stable")[:, : cfg.top_k]
        best_values = np.take_along_axis(values, order, axis=1)
        best_locations = np.take_along_axis(locations, order[:, :, None], axis=1)
    evaluated = cfg.rounds * cfg.candidates_per_round
    return Candidates(best_locations, best_values, evaluated)


def maximize_acquisition(
    value_fn: ValueFn,
    gradient_fn: ValueFn,
    starts: Array,
    steps: int,
    rate: float,
    low: float = 0.0,
    high: float = 1.0,
) -> Tuple[Array, float]:
    """Box-constrained Adam ascent from several starts at once.

    The best point seen over all starts and iterates, the starts included, is
    returned, so the result never scores below the best start.

    Args:
        value_fn: Maps (k, d) locations to k values.
        gradient_fn: Maps (k, d) locations to (k, d) gradients.
        starts (np.ndarray): Initial locations, shape (k, d).
        steps (int): Adam iterations.
        rate (float): Adam step size.

    Returns:
        Tuple[np.ndarray, float]: The best location and its value.

    """
    X = np.clip(np.atleast_2d(np.array(starts, dtype=np.float64)), low, high)
    values = np.asarray(value_fn(X), dtype=np.float64)
    best = int(np.argmax(values))
    best_x, best_value = X[best].copy(), float(values[best])

    first = np.zeros_like(X)
    second = np.zeros_like(X)
    for step in range(1, steps + 1):
        g = gradient_fn(X)
        first = ADAM_BETA1 * first + (1.0 - ADAM_BETA1) * g
        second = ADAM_BETA2 * second + (1.0 - ADAM_BETA2) * g**2
        first_hat = first / (1.0 - ADAM_BETA1**step)
        second_hat = second / (1.0 - ADAM_BETA2**step)
        ascent = rate * first_hat / (np.sqrt(second_hat) + ADAM_EPSILON)
        X = np.clip(X + ascent, low, high)
        values = np.asarray(value_fn(X), dtype=np.float64)
        index = int(np.argmax(values))
        if values[index] > best_value:
            best_x, best_value = X[index].copy(), float(values[index])
    return best_x, best_value
