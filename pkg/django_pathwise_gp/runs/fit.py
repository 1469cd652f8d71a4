"""Pipelines of the ``fit`` and ``sample`` commands."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.data.dataset import Dataset, Standardizer
from django_pathwise_gp.oracle.exact import (
    ExactPosterior,
    fit_exact,
    posterior_moments,
)
from django_pathwise_gp.predict.ensemble import predictive_moments
from django_pathwise_gp.predict.metrics import exact_metrics
from django_pathwise_gp.repository import ArtifactStore
from django_pathwise_gp.runs.common import (
    PosteriorFit,
    evaluate,
    fit_posterior,
    input_columns,
    query_grid,
    resolve_kernel,
    sgd_configs,
    trace_rows,
)
from django_pathwise_gp.settings.conf import config

logger = logging.getLogger(__name__)


@dataclass
class FitRun:
    fit: PosteriorFit
    train: Dataset
    test: Optional[Dataset]
    standardizer: Optional[Standardizer]
    provenance: Optional[Dict[str, Any]]
    exact: Optional[ExactPosterior] = None

    @property
    def evaluation(self) -> Dataset:
        return self.train if self.test is None else self.test


def _fit(attrs: Dict[str, Any], threads: Optional[int]) -> FitRun:
    seed = attrs["seed"]
    train, test, standardizer = attrs["data"].prepare(seed, attrs.get("kernel"))
    spec, provenance = resolve_kernel(attrs, train, seed, threads)
    mean_sgd, sample_sgd = sgd_configs(attrs, seed)
    fit = fit_posterior(
        attrs["method"],
        train,
        spec,
        seed,
        num_samples=attrs["num_samples"],
        num_features=attrs.get("num_features"),
        mean_sgd=mean_sgd,
        sample_sgd=sample_sgd,
        cg_config=attrs.get("cg"),
        inducing=attrs.get("inducing"),
        threads=threads,
    )
    run = FitRun(fit, train, test, standardizer, provenance)
    if attrs["compare_exact"] and train.num_points <= config.oracle_max_points:
        run.exact = fit.post or fit_exact(spec, train)
    return run


def _write_fit(store: ArtifactStore, fit: PosteriorFit) -> None:
    store.write_weights("mean_weights.npy", fit.mean_model.mean_weights)
    if fit.method == "sgd-inducing":
        store.write_weights("anchors.npy", fit.mean_model.anchors)
    if fit.sample_model is not None:
        store.write_weights("sample_weights.npy", fit.sample_model.sample_weights)
    for name, rows in trace_rows(fit).items():
        store.write_csv(name, rows)


def _metrics(run: FitRun) -> Dict[str, Any]:
    fit = run.fit
    payload: Dict[str, Any] = {
        "method": fit.method,
        "kernel": fit.spec.to_dict(),
        "num_train": run.train.num_points,
        "num_test": 0 if run.test is None else run.test.num_points,
        "evaluated_on": "train" if run.test is None else "test",
        "num_anchors": fit.mean_model.num_anchors,
        "num_samples": fit.sample_model.num_samples if fit.sample_model else 0,
        "metrics": evaluate(fit, run.evaluation),
    }
    if run.provenance is not None:
        payload["hyperparameters"] = run.provenance
    if run.standardizer is not None:
        payload["standardizer"] = run.standardizer.to_dict()
    if fit.cg_results:
        payload["cg"] = {
            "iterations": [result.iterations for result in fit.cg_results],
            "converged": [result.converged for result in fit.cg_results],
        }
    if run.exact is not None:
        exact_mean, _ = posterior_moments(run.exact, run.evaluation.inputs)
        gap = fit.predict_mean(run.evaluation.inputs) - exact_mean
        payload["exact"] = exact_metrics(run.exact, run.evaluation).to_dict()
        payload["mean_rmse_to_exact"] = float(np.sqrt(np.mean(gap**2)))
        if fit.method != "sgd-inducing":
            payload["weight_error"] = float(
                np.linalg.norm(fit.mean_model.mean_weights - run.exact.weights)
            )
    return payload


def run_fit(
    attrs: Dict[str, Any], store: ArtifactStore, threads: Optional[int] = None
) -> Dict[str, Any]:
    """Fit a posterior and write its weights, optimizer traces and
    ``metrics.json``."""
    run = _fit(attrs, threads)
    _write_fit(store, run.fit)
    payload = _metrics(run)
    store.write_metrics("metrics.json", payload)
    return payload


def _prediction_rows(
    run: FitRun, Xstar: Array, attrs: Dict[str, Any]
) -> List[Dict[str, Any]]:
    ens = run.fit.ensemble
    mean, variance = predictive_moments(ens, Xstar)
    values = ens.sample_values(Xstar) if attrs["write_samples"] else None
    exact = posterior_moments(run.exact, Xstar) if run.exact is not None else None
    scale = 1.0
    raw_inputs = Xstar
    if run.standardizer is not None:
        raw_inputs = run.standardizer.inverse_inputs(Xstar)
        scale = run.standardizer.target_std
        mean = run.standardizer.inverse_targets(mean)
        if values is not None:
            values = run.standardizer.inverse_targets(values)
        if exact is not None:
            exact = (run.standardizer.inverse_targets(exact[0]), exact[1])
    columns = input_columns(Xstar.shape[1])
    rows = []
    for n in range(Xstar.shape[0]):
        row: Dict[str, Any] = dict(zip(columns, raw_inputs[n]))
        row["mean"] = mean[n]
        row["variance"] = variance[n] * scale**2
        if exact is not None:
            row["exact_mean"] = exact[0][n]
            row["exact_variance"] = exact[1][n] * scale**2
        if values is not None:
            for s in range(values.shape[0]):
                row[f"sample_{s}"] = values[s, n]
        rows.append(row)
    return rows


def run_sample(
    attrs: Dict[str, Any], store: ArtifactStore, threads: Optional[int] = None
) -> Dict[str, Any]:
    """Fit a posterior with samples and write pathwise predictions at the
    query points to ``predictions.csv``.

    Query grids are given in the units of the raw data; standardized runs
    map them into the model's units and map predictions back.
    """
    run = _fit(attrs, threads)
    _write_fit(store, run.fit)
    if attrs.get("query") is not None:
        Xstar = query_grid(attrs["query"], run.train.dim)
        if run.standardizer is not None:
            Xstar = run.standardizer.transform_inputs(Xstar)
    else:
        Xstar = run.evaluation.inputs
    store.write_csv("predictions.csv", _prediction_rows(run, Xstar, attrs))
    payload = _metrics(run)
    payload["num_queries"] = int(Xstar.shape[0])
    store.write_metrics("metrics.json", payload)
    return payload
