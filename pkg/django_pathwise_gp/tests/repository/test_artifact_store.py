import csv
import json
import sys

import numpy as np
import pytest

from django_pathwise_gp.exceptions import DataError
from django_pathwise_gp.repository import ArtifactStore
from django_pathwise_gp.repository.artifact_store import canonical_json, config_digest
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.repository,
    pytest.mark.repository_artifact_store,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]


class TestCanonicalForm:
    def test_canonical_json(self) -> None:
        """
        Test the canonical JSON layout.

        Asserts:
        -------
            Keys are sorted and numpy values become plain JSON.
        """
        text = canonical_json({"b": np.float64(1.5), "a": np.arange(2)})
        assert text == '{\n  "a": [\n    0,\n    1\n  ],\n  "b": 1.5\n}\n'

    def test_digest_ignores_key_order(self) -> None:
        """
        Test the configuration digest.

        Asserts:
        -------
            Key order does not matter but values do.
        """
        assert config_digest({"a": 1, "b": 2}) == config_digest({"b": 2, "a": 1})
        assert config_digest({"a": 1}) != config_digest({"a": 2})


class TestArtifactStore:
    def test_metadata_embedded_in_metrics(self, tmp_path) -> None:
        """
        Test metadata and metric files.

        Args:
        ----
            tmp_path: Pytest's temporary directory.

        Asserts:
        -------
            The metadata block is written on its own and inside metric files.
        """
        store = ArtifactStore(tmp_path / "run")
        metadata = store.write_metadata("fit", {"seed": 3}, 3)
        assert metadata["command"] == "fit"
        assert metadata["format_version"] == 1
        store.write_metrics("metrics.json", {"rmse": 0.5})
        payload = json.loads((tmp_path / "run" / "metrics.json").read_text())
        assert payload == {"metadata": metadata, "rmse": 0.5}
        on_disk = json.loads((tmp_path / "run" / "metadata.json").read_text())
        assert on_disk == metadata

    def test_csv_and_weights(self, tmp_path) -> None:
        """
        Test table and weight files.

        Args:
        ----
            tmp_path: Pytest's temporary directory.

        Asserts:
        -------
            Floats are written at full precision and weights load back exactly.
        """
        store = ArtifactStore(tmp_path)
        store.write_csv("table.csv", [{"i": np.int64(1), "value": 0.1 + 0.2}])
        with open(tmp_path / "table.csv", newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert rows == [{"i": "1", "value": repr(0.1 + 0.2)}]
        assert float(rows[0]["value"]) == 0.1 + 0.2

        weights = np.random.default_rng(0).standard_normal((3, 4))
        path = store.write_weights("w.npy", weights)
        np.testing.assert_array_equal(np.load(path), weights)

    def test_empty_table_with_header(self, tmp_path) -> None:
        """
        Test a table without rows.

        Args:
        ----
            tmp_path: Pytest's temporary directory.

        Asserts:
        -------
            Only the header is written.
        """
        ArtifactStore(tmp_path).write_csv("empty.csv", [], fieldnames=["a", "b"])
        assert (tmp_path / "empty.csv").read_text() == "a,b\r\n"

    def test_unwritable_directory(self, tmp_path) -> None:
        """
        Test an output directory that cannot be created.

        Args:
        ----
            tmp_path: Pytest's temporary directory.

        Asserts:
        -------
            DataError is raised.
        """
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(DataError, match="Cannot create output directory"):
            ArtifactStore(blocker / "run")
