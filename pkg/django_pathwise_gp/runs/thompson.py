"""Pipeline of the ``thompson`` command."""

import logging
from typing import Any, Dict, List, Optional

from django_pathwise_gp.repository import ArtifactStore
from django_pathwise_gp.thompson.config import Backend, ThompsonConfig
from django_pathwise_gp.thompson.loop import random_search, thompson_loop

logger = logging.getLogger(__name__)


def run_thompson(
    attrs: Dict[str, Any], store: ArtifactStore, threads: Optional[int] = None
) -> Dict[str, Any]:
    """Run Thompson sampling for every (lengthscale, seed) combination.

    Without ``lengthscales`` and ``seeds`` this is a single run with the
    configured lengthscale and the run seed. With ``include_random`` every
    combination is also run as equal-budget random search on the same
    target. ``thompson_trace.csv`` holds every trace; ``thompson.json``
    the final maxima.
    """
    options = dict(attrs.get("thompson") or {})
    default_lengthscale = options.pop("lengthscale", ThompsonConfig().lengthscale)
    lengthscales = attrs.get("lengthscales") or [default_lengthscale]
    seeds = attrs.get("seeds") or [attrs["seed"]]

    trace_rows: List[Dict[str, Any]] = []
    results: List[Dict[str, Any]] = []
    for lengthscale in lengthscales:
        for seed in seeds:
            cfg = ThompsonConfig(lengthscale=lengthscale, seed=seed, **options)
            runs = [(cfg.backend.value, thompson_loop)]
            if attrs["include_random"] and cfg.backend is not Backend.RANDOM:
                runs.append((Backend.RANDOM.value, random_search))
            for backend, runner in runs:
                trace = runner(cfg)
                for row in trace.rows():
                    trace_rows.append(
                        {
                            "lengthscale": lengthscale,
                            "seed": seed,
                            "backend": backend,
                            **row,
                        }
                    )
                results.append(
                    {
                        "lengthscale": lengthscale,
                        "seed": seed,
                        "backend": backend,
                        "final_max": trace.final_max,
                        "evaluations": trace.evaluations,
                    }
                )
                logger.info(
                    "Thompson %s, lengthscale %g, seed %d: final max %.6g",
                    backend,
                    lengthscale,
                    seed,
                    trace.final_max,
                )
    store.write_csv("thompson_trace.csv", trace_rows)
    payload = {"runs": results}
    store.write_metrics("thompson.json", payload)
    return payload
