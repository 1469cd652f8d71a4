import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

import numpy as np
from rest_framework.utils.encoders import JSONEncoder

from django_pathwise_gp.constants.types import Array
from django_pathwise_gp.exceptions import DataError
from django_pathwise_gp.settings.conf import config

logger = logging.getLogger(__name__)

METADATA_FILE = "metadata.json"


def canonical_json(payload: Any) -> str:
    """Key-sorted JSON with a fixed layout; numpy arrays and scalars are
    converted to lists and Python numbers."""
    return json.dumps(payload, cls=JSONEncoder, sort_keys=True, indent=2) + "\n"


def config_digest(payload: Mapping[str, Any]) -> str:
    """SHA-256 of the compact canonical form of a configuration."""
    compact = json.dumps(
        payload, cls=JSONEncoder, sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


class ArtifactStore:
    """Writes the outputs of one run into an output directory.

    A run owns its directory; files are overwritten, never appended. Every
    JSON file is written in canonical form so that identical runs produce
    identical bytes, and metric files embed the run's metadata block.

    Methods:
        write_metadata: Writes ``metadata.json`` and remembers the block.
        write_json: Writes a canonical JSON file.
        write_metrics: Writes a JSON file with the metadata block embedded.
        write_csv: Writes rows of a table.
        write_weights: Writes an array checkpoint in ``.npy`` format.

    """

    def __init__(self, out_dir: Optional[Union[str, Path]] = None) -> None:
        self.out_dir = Path(out_dir or config.output_dir)
        self.metadata: Dict[str, Any] = {}
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DataError(
                f"Cannot create output directory {self.out_dir}: {e}"
            ) from e

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def _write_text(self, name: str, text: str) -> Path:
        target = self.path(name)
        try:
            target.write_text(text, encoding="utf-8")
        except OSError as e:
            raise DataError(f"Cannot write {target}: {e}") from e
        logger.info("Wrote %s", target)
        return target

    def write_metadata(
        self, command: str, run_config: Mapping[str, Any], seed: int
    ) -> Dict[str, Any]:
        self.metadata = {
            "command": command,
            "format_version": config.format_version,
            "config_sha256": config_digest(run_config),
            "seed": seed,
        }
        self._write_text(METADATA_FILE, canonical_json(self.metadata))
        return self.metadata

    def write_json(self, name: str, payload: Any) -> Path:
        return self._write_text(name, canonical_json(payload))

    def write_metrics(self, name: str, payload: Mapping[str, Any]) -> Path:
        return self.write_json(name, {"metadata": self.metadata, **payload})

    def write_csv(
        self,
        name: str,
        rows: Iterable[Mapping[str, Any]],
        fieldnames: Optional[List[str]] = None,
    ) -> Path:
        """Write ``rows`` under a header; the header defaults to the keys of
        the first row, in order."""
        rows = list(rows)
        if fieldnames is None:
            fieldnames = list(rows[0]) if rows else []
        target = self.path(name)
        try:
            with target.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=fieldnames)
                writer.writeheader()
                for row in rows:
                    writer.writerow({key: _cell(value) for key, value in row.items()})
        except OSError as e:
            raise DataError(f"Cannot write {target}: {e}") from e
        logger.info("Wrote %d rows to %s", len(rows), target)
        return target

    def write_weights(self, name: str, weights: Array) -> Path:
        target = self.path(name)
        try:
            np.save(target, np.asarray(weights), allow_pickle=False)
        except OSError as e:
            raise DataError(f"Cannot write {target}: {e}") from e
        logger.info("Wrote weights %s to %s", np.shape(weights), target)
        return target


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value
