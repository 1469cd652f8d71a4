"""Pipeline of the ``diagnose`` command: spectral error analysis of SGD
against the exact solution on a dataset under the oracle cap."""

import logging
from typing import Any, Dict, List, Optional

import numpy as np

from django_pathwise_gp.constants.streams import STREAM_FEATURES, STREAM_SGD
from django_pathwise_gp.diagnostics.spectral import (
    SpectralDecomposition,
    coefficient_bound,
    decompose,
    projected_errors,
    simulate_noisy_polyak_sgd,
    spectral_table,
)
from django_pathwise_gp.oracle.exact import fit_exact
from django_pathwise_gp.predict.ensemble import assemble, exact_models
from django_pathwise_gp.predict.metrics import paired_w2_profile, w2_profile
from django_pathwise_gp.repository import ArtifactStore
from django_pathwise_gp.runs.common import input_columns, query_grid, sgd_configs
from django_pathwise_gp.settings.conf import config
from django_pathwise_gp.solvers.objectives import init_sample_slots
from django_pathwise_gp.solvers.sgd import fit_mean_sgd, fit_samples_sgd
from django_pathwise_gp.utils.random import derive_seed

logger = logging.getLogger(__name__)


def stable_learning_rate(dec: SpectralDecomposition, noise_variance: float) -> float:
    """Half the largest stable gradient-descent step size."""
    top = dec.top_eigenvalue
    return 0.5 * noise_variance / (top * (top + noise_variance))


def error_bound_check(
    dec: SpectralDecomposition,
    y: np.ndarray,
    noise_variance: float,
    options: Dict[str, Any],
    seed: int,
) -> Dict[str, Any]:
    """Compare injected-noise Polyak SGD errors with the coefficient bound in
    every spectral direction.

    Returns:
        Dict[str, Any]: ``rows`` for the CSV table (median error over runs
        per direction) and a ``summary`` of the coverage fractions.

    """
    eta = options.get("learning_rate") or stable_learning_rate(dec, noise_variance)
    steps = options["steps"]
    noise = options["gradient_noise"]
    delta = options["delta"]
    errors = simulate_noisy_polyak_sgd(
        dec,
        y,
        eta,
        noise_variance,
        steps,
        noise,
        options["runs"],
        seed=derive_seed(seed, STREAM_SGD),
    )
    bound = coefficient_bound(
        dec, steps, eta, noise_variance, float(np.linalg.norm(y)), noise, delta
    )
    within = errors <= bound[None, :]
    rows = spectral_table(dec, np.median(errors, axis=0), bound)
    for row, fraction in zip(rows, within.mean(axis=0)):
        row["fraction_within"] = float(fraction)
    summary = {
        "learning_rate": eta,
        "steps": steps,
        "gradient_noise": noise,
        "delta": delta,
        "runs": options["runs"],
        "runs_within_bound": float(np.mean(np.all(within, axis=1))),
        "directions_within_bound": float(
            np.mean([row["measured_error"] <= row["bound"] for row in rows])
        ),
    }
    return {"rows": rows, "summary": summary}


# pylint: disable=too-many-locals
def run_diagnose(
    attrs: Dict[str, Any], store: ArtifactStore, threads: Optional[int] = None
) -> Dict[str, Any]:
    """Write ``spectral_errors.csv``, ``error_trace.csv``,
    ``w2_profile.csv``, optionally ``error_bound.csv``, and
    ``diagnostics.json``."""
    seed = attrs["seed"]
    spec = attrs["kernel"]
    train, _, _ = attrs["data"].prepare(seed, spec)
    dec = decompose(spec, train)
    post = fit_exact(spec, train)
    v_star = post.weights

    def monitor(step: int, weights: np.ndarray) -> Dict[str, float]:
        errors = projected_errors(dec, weights, v_star)
        return {
            "euclidean_error": float(np.linalg.norm(weights - v_star)),
            "rkhs_error": errors.rkhs_total,
        }

    mean_sgd, sample_sgd = sgd_configs(attrs, seed)
    mean_model, trace = fit_mean_sgd(train, spec, mean_sgd, monitor=monitor)
    store.write_csv("error_trace.csv", trace.rows())

    errors = projected_errors(dec, mean_model.mean_weights, v_star)
    store.write_csv(
        "spectral_errors.csv",
        [
            {
                "i": i + 1,
                "eigenvalue": float(dec.eigenvalues[i]),
                "coefficient_error": float(errors.coefficients[i]),
                "rkhs_error": float(errors.rkhs[i]),
            }
            for i in range(dec.num_points)
        ],
    )

    slots = init_sample_slots(
        spec,
        train.inputs,
        attrs.get("num_samples") or config.diagnostic_samples,
        attrs.get("num_features") or config.prior_features,
        derive_seed(seed, STREAM_FEATURES),
    )
    sample_model, _ = fit_samples_sgd(train, spec, slots, sample_sgd, threads=threads)
    ens = assemble(mean_model, sample_model)
    if attrs.get("query") is not None:
        Xstar = query_grid(attrs["query"], train.dim)
    else:
        Xstar = train.inputs
    w2 = w2_profile(ens, post, Xstar)
    paired = paired_w2_profile(ens, assemble(*exact_models(post, slots)), Xstar)
    columns = input_columns(train.dim)
    w2_rows: List[Dict[str, Any]] = [
        {
            **dict(zip(columns, Xstar[n])),
            "w2": float(w2[n]),
            "w2_paired": float(paired[n]),
        }
        for n in range(Xstar.shape[0])
    ]
    store.write_csv("w2_profile.csv", w2_rows)

    payload: Dict[str, Any] = {
        "kernel": spec.to_dict(),
        "num_train": train.num_points,
        "top_eigenvalue": dec.top_eigenvalue,
        "euclidean_error": float(np.linalg.norm(mean_model.mean_weights - v_star)),
        "rkhs_error": errors.rkhs_total,
        "num_samples": ens.num_samples,
        "mean_w2": float(np.mean(w2)),
        "max_w2": float(np.max(w2)),
        "mean_w2_paired": float(np.mean(paired)),
    }
    if attrs.get("error_bound") is not None:
        check = error_bound_check(
            dec, train.targets, spec.noise_variance, attrs["error_bound"], seed
        )
        store.write_csv("error_bound.csv", check["rows"])
        payload["error_bound"] = check["summary"]
    store.write_metrics("diagnostics.json", payload)
    return payload
