"""Building blocks shared by the run pipelines of the management commands."""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from django_pathwise_gp.constants.streams import STREAM_FEATURES
from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset
from django_pathwise_gp.data.inducing import knn_inducing_select
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelSpec, gram
from django_pathwise_gp.oracle.exact import ExactPosterior, fit_exact
from django_pathwise_gp.oracle.hyperparameters import (
    fit_hyperparameters,
    fit_hyperparameters_centroids,
)
from django_pathwise_gp.predict.ensemble import (
    PosteriorEnsemble,
    assemble,
    exact_models,
)
from django_pathwise_gp.predict.metrics import (
    exact_metrics,
    metrics,
    metrics_from_moments,
)
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.solvers.cg import (
    CgConfig,
    CgResult,
    cg_posterior_mean,
    cg_sample_weights,
)
from django_pathwise_gp.solvers.objectives import RepresenterModel, init_sample_slots
from django_pathwise_gp.solvers.sgd import (
    OptTrace,
    SgdConfig,
    fit_mean_sgd,
    fit_samples_sgd,
)
from django_pathwise_gp.utils.random import derive_seed

logger = logging.getLogger(__name__)


def resolve_kernel(
    attrs: Dict[str, Any], train: Dataset, seed: int, threads: Optional[int] = None
) -> Tuple[KernelSpec, Optional[Dict[str, Any]]]:
    """The configured kernel, or one fitted by marginal likelihood together
    with the provenance of the fit."""
    if attrs.get("kernel") is not None:
        return attrs["kernel"], None
    options = attrs["hyperparameters"]
    if options["num_centroids"] is None:
        fit = fit_hyperparameters(train, options["search"])
        return fit.spec, fit.to_dict()
    centroid_fit = fit_hyperparameters_centroids(
        train,
        options["num_centroids"],
        options["subset_size"],
        options["search"],
        seed=seed,
        threads=threads,
    )
    return centroid_fit.spec, centroid_fit.to_dict()


def sgd_configs(attrs: Dict[str, Any], seed: int) -> Tuple[SgdConfig, SgdConfig]:
    """Mean and sample SGD settings from the config overrides and defaults."""
    mean = SgdConfig.for_mean(seed=seed, **dict(attrs.get("mean_sgd") or {}))
    samples = SgdConfig.for_samples(seed=seed, **dict(attrs.get("sample_sgd") or {}))
    return mean, samples


def query_grid(grid: Dict[str, Any], dim: int) -> Array:
    """Cartesian product of ``num_points`` equispaced values per dimension,
    the last dimension varying fastest."""
    axis = np.linspace(grid["low"], grid["high"], grid["num_points"])
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def input_columns(dim: int) -> List[str]:
    return ["x"] if dim == 1 else [f"x{i}" for i in range(dim)]


def inducing_anchors(
    train: Dataset, spec: KernelSpec, options: Optional[Dict[str, Any]]
) -> Array:
    options = options or {}
    lengthscale = options.get("lengthscale") or float(np.min(spec.lengthscale_array))
    indices = knn_inducing_select(train, lengthscale, options.get("neighbors", 16))
    return train.inputs[indices]


@dataclass
class PosteriorFit:
    """Everything one inference method produced on a training set.

    ``sample_model`` is set when samples were requested, ``post`` when the
    exact posterior was computed (method ``exact`` or an exact comparison).
    """

    method: str
    spec: KernelSpec
    mean_model: RepresenterModel
    sample_model: Optional[RepresenterModel] = None
    mean_trace: Optional[OptTrace] = None
    sample_traces: List[OptTrace] = field(default_factory=list)
    cg_results: List[CgResult] = field(default_factory=list)
    post: Optional[ExactPosterior] = None
    wall_time: float = 0.0

    @property
    def ensemble(self) -> Optional[PosteriorEnsemble]:
        if self.sample_model is None:
            return None
        return assemble(self.mean_model, self.sample_model)

    def predict_mean(self, Xstar: Array) -> Array:
        cross = gram(self.spec, Xstar, self.mean_model.anchors)
        return cross @ self.mean_model.mean_weights


# pylint: disable=too-many-arguments,too-many-locals
def fit_posterior(
    method: str,
    train: Dataset,
    spec: KernelSpec,
    seed: int,
    num_samples: int = 0,
    num_features: Optional[int] = None,
    mean_sgd: Optional[SgdConfig] = None,
    sample_sgd: Optional[SgdConfig] = None,
    cg_config: Optional[CgConfig] = None,
    inducing: Optional[Dict[str, Any]] = None,
    threads: Optional[int] = None,
) -> PosteriorFit:
    """Fit mean weights, and ``num_samples`` pathwise sample weights, with
    one of the methods ``exact``, ``sgd``, ``sgd-inducing`` or ``cg``.

    Sample slots depend on the run seed only, so every method draws the same
    prior functions and noise for the same seed.
    """
    started = time.perf_counter()
    slots = []
    if num_samples:
        slots = init_sample_slots(
            spec,
            train.inputs,
            num_samples,
            num_features or config.prior_features,
            derive_seed(seed, STREAM_FEATURES),
        )
    fit: PosteriorFit
    if method == "exact":
        post = fit_exact(spec, train)
        if slots:
            mean_model, sample_model = exact_models(post, slots)
        else:
            mean_model = RepresenterModel(spec, train.inputs, mean_weights=post.weights)
            sample_model = None
        fit = PosteriorFit(method, spec, mean_model, sample_model, post=post)
    elif method in ("sgd", "sgd-inducing"):
        anchors = None
        if method == "sgd-inducing":
            anchors = inducing_anchors(train, spec, inducing)
        mean_sgd = mean_sgd or SgdConfig.for_mean(seed=seed)
        mean_model, mean_trace = fit_mean_sgd(train, spec, mean_sgd, anchors=anchors)
        fit = PosteriorFit(method, spec, mean_model, mean_trace=mean_trace)
        if slots:
            fit.sample_model, fit.sample_traces = fit_samples_sgd(
                train,
                spec,
                slots,
                sample_sgd or SgdConfig.for_samples(seed=seed),
                anchors=anchors,
                threads=threads,
            )
    elif method == "cg":
        mean_model, result = cg_posterior_mean(spec, train, cg_config)
        fit = PosteriorFit(method, spec, mean_model, cg_results=[result])
        if slots:
            fit.sample_model, sample_results = cg_sample_weights(
                spec, train, slots, cg_config
            )
            fit.cg_results.extend(sample_results)
    else:
        raise ConfigurationError(f"unknown method '{method}'.")
    fit.wall_time = time.perf_counter() - started
    logger.info("Fitted %s posterior in %.3fs", method, fit.wall_time)
    return fit


def evaluate(fit: PosteriorFit, test: Dataset) -> Dict[str, Any]:
    """Test metrics of a fit: RMSE of the mean always, NLL when the exact
    posterior or at least two samples are available."""
    if fit.post is not None:
        return exact_metrics(fit.post, test).to_dict()
    if fit.sample_model is not None and fit.sample_model.num_samples >= 2:
        return metrics(fit.ensemble, test).to_dict()
    mean = fit.predict_mean(test.inputs)
    rmse = metrics_from_moments(
        mean, np.zeros_like(mean), test.targets, fit.spec.noise_variance
    ).rmse
    return {"rmse": rmse, "nll": None}


def trace_rows(fit: PosteriorFit) -> Dict[str, List[Dict[str, Any]]]:
    """CSV tables of the optimizer traces of a fit, keyed by file name."""
    tables: Dict[str, List[Dict[str, Any]]] = {}
    if fit.mean_trace is not None:
        tables["mean_trace.csv"] = fit.mean_trace.rows()
    if fit.sample_traces:
        tables["sample_trace.csv"] = [
            {"sample": index, **row}
            for index, trace in enumerate(fit.sample_traces)
            for row in trace.rows()
        ]
    if fit.cg_results:
        tables["cg_trace.csv"] = [
            {
                "solve": "mean" if index == 0 else f"sample_{index - 1}",
                "iteration": iteration,
                "relative_residual": residual,
            }
            for index, result in enumerate(fit.cg_results)
            for iteration, residual in enumerate(result.residual_history)
        ]
    return tables
