import copy
import csv
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from django_pathwise_gp.cli import main
from django_pathwise_gp.tests.constants import PYTHON_VERSION, PYTHON_VERSION_REASON

pytestmark = [
    pytest.mark.management,
    pytest.mark.management_commands,
    pytest.mark.skipif(sys.version_info < PYTHON_VERSION, reason=PYTHON_VERSION_REASON),
]

KERNEL = {
    "family": "squared_exponential",
    "lengthscales": [0.5],
    "noise_variance": 0.1,
}


def _read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def _read_json(path: Path) -> Dict[str, Any]:
    return json.loads(path.read_text())


class TestFitAndSample:
    def test_fit_writes_outputs(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test ``gp_fit`` end to end on the toy problem.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            Weights, traces and metrics are written and the metrics carry the
            metadata block and the exact comparison.
        """
        out = tmp_path / "fit"
        call_command("gp_fit", config=write_config(toy_fit_config), out=str(out))
        for name in (
            "metadata.json",
            "metrics.json",
            "mean_weights.npy",
            "sample_weights.npy",
            "mean_trace.csv",
            "sample_trace.csv",
        ):
            assert (out / name).exists(), name
        metrics = _read_json(out / "metrics.json")
        assert metrics["metadata"]["command"] == "fit"
        assert metrics["num_train"] == 160
        assert metrics["num_test"] == 40
        assert metrics["num_samples"] == 4
        assert np.isfinite(metrics["metrics"]["rmse"])
        assert "mean_rmse_to_exact" in metrics
        assert np.load(out / "sample_weights.npy").shape == (4, 160)

    def test_metrics_are_reproducible(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test byte-identical metrics for repeated runs with the same seed,
        whatever the thread count.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            ``metrics.json`` bytes agree.
        """
        path = write_config(toy_fit_config)
        call_command("gp_fit", config=path, out=str(tmp_path / "a"))
        call_command("gp_fit", config=path, out=str(tmp_path / "b"), threads=2)
        first = (tmp_path / "a" / "metrics.json").read_bytes()
        assert first == (tmp_path / "b" / "metrics.json").read_bytes()

    def test_seed_override(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test the ``--seed`` override.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            The metadata records the overriding seed.
        """
        call_command(
            "gp_fit", config=write_config(toy_fit_config), out=str(tmp_path), seed=5
        )
        assert _read_json(tmp_path / "metadata.json")["seed"] == 5

    @pytest.mark.parametrize("method", ["exact", "cg", "sgd-inducing"])
    def test_other_methods(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
        method: str,
    ) -> None:
        """
        Test ``gp_fit`` with the remaining inference methods.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.
            method (str): Inference method.

        Asserts:
        -------
            The run succeeds and reports its method; CG runs write their trace
            and inducing runs their anchors.
        """
        payload = {**toy_fit_config, "method": method}
        call_command("gp_fit", config=write_config(payload), out=str(tmp_path))
        metrics = _read_json(tmp_path / "metrics.json")
        assert metrics["method"] == method
        if method == "cg":
            assert (tmp_path / "cg_trace.csv").exists()
            assert len(metrics["cg"]["iterations"]) == 5
        if method == "sgd-inducing":
            assert metrics["num_anchors"] == np.load(tmp_path / "anchors.npy").shape[0]
            assert metrics["num_anchors"] <= 160
        if method == "exact":
            assert metrics["metrics"] == metrics["exact"]

    def test_sample_predictions_in_raw_units(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test ``gp_sample`` on a query grid with standardized data.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            One prediction row per query point, inputs in the units of the
            configuration, with positive variances and sample columns.
        """
        payload = copy.deepcopy(toy_fit_config)
        payload["data"]["standardize"] = True
        payload.update(
            query={"low": -2.0, "high": 2.0, "num_points": 5}, write_samples=True
        )
        call_command("gp_sample", config=write_config(payload), out=str(tmp_path))
        rows = _read_csv(tmp_path / "predictions.csv")
        assert len(rows) == 5
        assert list(rows[0]) == [
            "x",
            "mean",
            "variance",
            "exact_mean",
            "exact_variance",
            "sample_0",
            "sample_1",
            "sample_2",
            "sample_3",
        ]
        np.testing.assert_allclose(
            [float(row["x"]) for row in rows], np.linspace(-2.0, 2.0, 5), atol=1e-10
        )
        assert all(float(row["variance"]) > 0 for row in rows)
        assert _read_json(tmp_path / "metrics.json")["num_queries"] == 5


class TestOtherCommands:
    def test_diagnose(self, write_config: Callable[..., str], tmp_path: Path) -> None:
        """
        Test ``gp_diagnose`` with the injected-noise bound check.

        Args:
        ----
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            Every diagnostics file is written, with one spectral row per
            training point and runs within the bound.
        """
        payload = {
            "format_version": 1,
            "data": {"generator": {"name": "sinusoid", "num_points": 40}},
            "kernel": KERNEL,
            "mean_sgd": {"steps": 200, "batch_size": 64},
            "sample_sgd": {"steps": 200, "batch_size": 64},
            "num_samples": 4,
            "num_features": 100,
            "error_bound": {"steps": 100, "runs": 10},
        }
        call_command("gp_diagnose", config=write_config(payload), out=str(tmp_path))
        assert len(_read_csv(tmp_path / "spectral_errors.csv")) == 40
        profile = _read_csv(tmp_path / "w2_profile.csv")
        assert len(profile) == 40
        assert list(profile[0]) == ["x", "w2", "w2_paired"]
        assert len(_read_csv(tmp_path / "error_bound.csv")) == 40
        assert _read_csv(tmp_path / "error_trace.csv")
        diagnostics = _read_json(tmp_path / "diagnostics.json")
        assert diagnostics["num_samples"] == 4
        assert diagnostics["error_bound"]["runs_within_bound"] >= 0.9

    def test_benchmark(self, write_config: Callable[..., str], tmp_path: Path) -> None:
        """
        Test ``gp_benchmark`` over three methods.

        Args:
        ----
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            One row per method, with timings in the CSV only.
        """
        payload = {
            "format_version": 1,
            "datasets": [
                {
                    "name": "toy",
                    "data": {
                        "generator": {"name": "sinusoid", "num_points": 100},
                        "split": {"train_fraction": 0.8},
                    },
                    "kernel": KERNEL,
                }
            ],
            "methods": ["exact", "cg", "sgd"],
            "mean_sgd": {"steps": 200, "batch_size": 64},
            "sample_sgd": {"steps": 200, "batch_size": 64},
            "num_samples": 4,
            "num_features": 100,
        }
        call_command("gp_benchmark", config=write_config(payload), out=str(tmp_path))
        rows = _read_csv(tmp_path / "benchmark.csv")
        assert [row["method"] for row in rows] == ["exact", "cg", "sgd"]
        assert "wall_time_s" in rows[0]
        summary = _read_json(tmp_path / "benchmark.json")["rows"]
        assert len(summary) == 3
        assert "wall_time_s" not in summary[0]

    def test_thompson(self, write_config: Callable[..., str], tmp_path: Path) -> None:
        """
        Test ``gp_thompson`` with a random-search baseline over two seeds.

        Args:
        ----
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            Every (seed, backend) pair is run with the same budget.
        """
        payload = {
            "format_version": 1,
            "thompson": {
                "dim": 1,
                "batch_size": 2,
                "steps": 2,
                "initial_points": 10,
                "candidates_per_round": 100,
                "rounds": 1,
                "ascent_steps": 5,
                "num_features": 100,
            },
            "seeds": [0, 1],
            "include_random": True,
        }
        call_command("gp_thompson", config=write_config(payload), out=str(tmp_path))
        runs = _read_json(tmp_path / "thompson.json")["runs"]
        assert [(run["seed"], run["backend"]) for run in runs] == [
            (0, "exact"),
            (0, "random"),
            (1, "exact"),
            (1, "random"),
        ]
        assert {run["evaluations"] for run in runs} == {14}
        assert len(_read_csv(tmp_path / "thompson_trace.csv")) == 4 * 3

    def test_gen_data(self, write_config: Callable[..., str], tmp_path: Path) -> None:
        """
        Test ``gp_gen_data`` with a split.

        Args:
        ----
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            The data and both halves of the split are written as CSV.
        """
        payload = {
            "format_version": 1,
            "data": {
                "generator": {"name": "sinusoid", "num_points": 20},
                "split": {"train_fraction": 0.75},
            },
        }
        call_command("gp_gen_data", config=write_config(payload), out=str(tmp_path))
        assert len(_read_csv(tmp_path / "data.csv")) == 20
        assert len(_read_csv(tmp_path / "train.csv")) == 15
        assert len(_read_csv(tmp_path / "test.csv")) == 5
        assert _read_json(tmp_path / "dataset.json")["num_train"] == 15


class TestExitCodes:
    def test_invalid_configuration(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test that invalid configurations exit with code 2 and name the field.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            CommandError with exit code 2 mentioning ``num_features``.
        """
        path = write_config({**toy_fit_config, "num_features": 7})
        with pytest.raises(CommandError, match="num_features") as info:
            call_command("gp_fit", config=path, out=str(tmp_path))
        assert info.value.returncode == 2

    def test_unreadable_and_malformed_files(
        self, tmp_path: Path, write_config: Callable[..., str]
    ) -> None:
        """
        Test missing and malformed configuration files.

        Args:
        ----
            tmp_path (Path): Pytest's temporary directory.
            write_config (Callable): Fixture writing the configuration to disk.

        Asserts:
        -------
            Both exit with code 2.
        """
        with pytest.raises(CommandError) as info:
            call_command("gp_fit", config=str(tmp_path / "missing.json"))
        assert info.value.returncode == 2

        broken = tmp_path / "broken.json"
        broken.write_text("{not json")
        with pytest.raises(CommandError) as info:
            call_command("gp_fit", config=str(broken))
        assert info.value.returncode == 2

        with pytest.raises(CommandError) as info:
            call_command("gp_fit", config=write_config([1, 2], name="list.json"))
        assert info.value.returncode == 2

    def test_divergence_exits_with_numerical_code(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test that a diverging SGD run exits with code 3.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            CommandError with exit code 3 naming DivergenceError.
        """
        payload = copy.deepcopy(toy_fit_config)
        payload["mean_sgd"] = {
            "steps": 100,
            "learning_rate": 100.0,
            "batch_size": 1000,
            "regularizer_features": 0,
        }
        with pytest.raises(CommandError, match="DivergenceError") as info:
            call_command("gp_fit", config=write_config(payload), out=str(tmp_path))
        assert info.value.returncode == 3


class TestCli:
    def test_help(self, capsys: pytest.CaptureFixture) -> None:
        """
        Test the usage message.

        Args:
        ----
            capsys (pytest.CaptureFixture): Captured output.

        Asserts:
        -------
            ``--help`` exits with 0 and lists every subcommand.
        """
        with pytest.raises(SystemExit) as info:
            main(["--help"])
        assert info.value.code == 0
        usage = capsys.readouterr().out
        for name in ("fit", "sample", "diagnose", "benchmark", "thompson", "gen-data"):
            assert name in usage

    @pytest.mark.parametrize("argv", [[], ["frobnicate"]])
    def test_usage_errors(self, argv: List[str]) -> None:
        """
        Test a missing or unknown subcommand.

        Args:
        ----
            argv (List[str]): Command-line arguments.

        Asserts:
        -------
            The exit code is 2.
        """
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2

    def test_subcommand_dispatch(
        self,
        toy_fit_config: Dict[str, Any],
        write_config: Callable[..., str],
        tmp_path: Path,
    ) -> None:
        """
        Test that subcommands run their management command.

        Args:
        ----
            toy_fit_config (Dict[str, Any]): Fixture with a valid configuration.
            write_config (Callable): Fixture writing the configuration to disk.
            tmp_path (Path): Pytest's temporary directory.

        Asserts:
        -------
            ``gen-data`` writes its data and an invalid ``fit`` exits with 2.
        """
        payload = {
            "format_version": 1,
            "data": {"generator": {"name": "grid", "num_points": 8}},
        }
        main(["gen-data", "--config", write_config(payload), "--out", str(tmp_path)])
        assert len(_read_csv(tmp_path / "data.csv")) == 8

        broken = write_config({**toy_fit_config, "seed": -1}, name="bad.json")
        with pytest.raises(SystemExit) as info:
            main(["fit", "--config", broken, "--out", str(tmp_path / "bad")])
        assert info.value.code == 2
