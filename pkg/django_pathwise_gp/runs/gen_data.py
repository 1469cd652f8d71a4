from typing import Any, Dict, Optional

from django_pathwise_gp.data.dataset import split, write_csv
from django_pathwise_gp.repository import ArtifactStore


# pylint: disable=unused-argument
def run_gen_data(
    attrs: Dict[str, Any], store: ArtifactStore, threads: Optional[int] = None
) -> Dict[str, Any]:
    """Write the configured data source to ``data.csv``, and its split to
    ``train.csv`` and ``test.csv`` when a split is configured."""
    source = attrs["data"]
    data = source.load(attrs["seed"], attrs.get("kernel"))
    target = attrs["target_name"]
    write_csv(data, str(store.path("data.csv")), target)
    payload: Dict[str, Any] = {"num_points": data.num_points, "dim": data.dim}
    if source.split is not None:
        train, test = split(data, source.split)
        write_csv(train, str(store.path("train.csv")), target)
        write_csv(test, str(store.path("test.csv")), target)
        payload.update(num_train=train.num_points, num_test=test.num_points)
    store.write_metrics("dataset.json", payload)
    return payload
