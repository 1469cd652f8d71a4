import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from django_pathwise_gp.constants.types import Array, Moments
from django_pathwise_gp.exceptions import ConfigurationError, DataError
from django_pathwise_gp.kernels.features import PriorFunctionDraw
from django_pathwise_gp.kernels.spec import KernelSpec, gram, gram_gradient
from django_pathwise_gp.oracle.exact import ExactPosterior, exact_sample_weights
from django_pathwise_gp.solvers.objectives import (
    RepresenterModel,
    SampleSlot,
    slot_targets,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PosteriorEnsemble:
    """Pathwise posterior samples sharing one anchor set.

    Sample s evaluates as f̃_s(x) + K_{x A}(v − α_s), where f̃_s is the slot's
    prior draw, v the mean weights and α_s the sample weights. The mean
    model alone gives the predictive mean.

    Attributes:
        spec (KernelSpec): Kernel of every term.
        mean_model (RepresenterModel): Model carrying the mean weights v.
        priors (Tuple[PriorFunctionDraw, ...]): Prior draw of every sample.
        corrections (np.ndarray): Rows v − α_s, shape (S, M).

    """

    spec: KernelSpec
    mean_model: RepresenterModel
    priors: Tuple[PriorFunctionDraw, ...]
    corrections: Array

    @property
    def anchors(self) -> Array:
        return self.mean_model.anchors

    @property
    def num_samples(self) -> int:
        return len(self.priors)

    def _cross(self, Xstar: Array) -> Array:
        return gram(self.spec, Xstar, self.anchors)

    def mean(self, Xstar: Array) -> Array:
        return self._cross(Xstar) @ self.mean_model.mean_weights

    def sample_values(self, Xstar: Array) -> Array:
        """Values of every sample at the query points, shape (S, n)."""
        cross = self._cross(Xstar)
        priors = np.vstack([prior(Xstar) for prior in self.priors])
        return priors + self.corrections @ cross.T

    def sample_value(self, index: int, Xstar: Array) -> Array:
        return self.priors[index](Xstar) + self._cross(Xstar) @ self.corrections[index]

    def sample_gradient(self, index: int, Xstar: Array) -> Array:
        """Gradient of sample ``index`` with respect to the query points,
        shape (n, d)."""
        kernel_part = np.einsum(
            "nmd,m->nd",
            gram_gradient(self.spec, Xstar, self.anchors),
            self.corrections[index],
        )
        return self.priors[index].gradient(Xstar) + kernel_part


def assemble(
    mean_model: RepresenterModel,
    sample_model: RepresenterModel,
    spec: Optional[KernelSpec] = None,
) -> PosteriorEnsemble:
    """Combine mean weights and sample weights into a posterior ensemble.

    The sample weights are used as learned: the shifted sampling objective
    has the same optimum as the plain one, so no δ term enters here.

    Raises:
        DataError: If the models do not share their anchor set or carry no
            weights of the required kind.
        ConfigurationError: If the models were fitted under different kernels.

    """
    spec = spec or mean_model.spec
    if mean_model.mean_weights is None:
        raise DataError("The mean model carries no mean weights.")
    if sample_model.sample_weights is None or sample_model.num_samples == 0:
        raise DataError("The sample model carries no sample weights.")
    if mean_model.anchors.shape != sample_model.anchors.shape or not np.array_equal(
        mean_model.anchors, sample_model.anchors
    ):
        raise DataError(
            f"Mean weights live on {mean_model.num_anchors} anchors and sample "
            f"weights on {sample_model.num_anchors} different anchors."
        )
    if sample_model.spec != spec or mean_model.spec != spec:
        raise ConfigurationError("Mean and sample models use different kernels.")

    corrections = mean_model.mean_weights[None, :] - sample_model.sample_weights
    corrections.setflags(write=False)
    priors = tuple(slot.prior for slot in sample_model.slots)
    return PosteriorEnsemble(spec, mean_model, priors, corrections)


def exact_models(
    post: ExactPosterior, slots: Sequence[SampleSlot]
) -> Tuple[RepresenterModel, RepresenterModel]:
    """Mean and sample models whose weights are solved exactly by Cholesky."""
    targets = slot_targets(slots)
    weights = exact_sample_weights(post, targets, np.zeros_like(targets))
    mean_model = RepresenterModel(post.spec, post.inputs, mean_weights=post.weights)
    sample_model = RepresenterModel(
        post.spec, post.inputs, sample_weights=weights, slots=slots
    )
    return mean_model, sample_model


def predictive_moments(ens: PosteriorEnsemble, Xstar: Array) -> Moments:
    """Predictive mean from the mean model and the unbiased sample variance
    of the ensemble at the query points.

    Raises:
        ConfigurationError: If the ensemble holds fewer than two samples.

    """
    if ens.num_samples < 2:
        raise ConfigurationError(
            f"A variance needs at least 2 samples, the ensemble has {ens.num_samples}."
        )
    values = ens.sample_values(Xstar)
    return ens.mean(Xstar), np.var(values, axis=0, ddof=1)
