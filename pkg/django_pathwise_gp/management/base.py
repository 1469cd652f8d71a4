import io
import logging
from argparse import ArgumentParser
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Type

from django.core.management.base import BaseCommand
from rest_framework import serializers
from rest_framework.parsers import JSONParser

from django_pathwise_gp.decorators import handle_pathwise_errors
from django_pathwise_gp.exceptions import DataError
from django_pathwise_gp.repository import ArtifactStore
from django_pathwise_gp.settings.conf import config

VERBOSITY_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}

Pipeline = Callable[[Dict[str, Any], ArtifactStore, Optional[int]], Dict[str, Any]]


def read_run_config(path: str) -> Dict[str, Any]:
    """Parse a JSON run configuration file into a dict."""
    try:
        content = Path(path).read_bytes()
    except OSError as e:
        raise DataError(f"Cannot read configuration file {path}: {e}") from e
    data = JSONParser().parse(io.BytesIO(content))
    if not isinstance(data, dict):
        raise serializers.ValidationError(
            {"non_field_errors": ["The configuration must be a JSON object."]}
        )
    return data


class PathwiseCommand(BaseCommand):
    """Base of the ``gp_*`` commands: reads and validates ``--config``,
    applies the command-line overrides, writes the run metadata and hands
    the validated configuration to the command's pipeline.

    Subclasses set ``serializer_class``, ``command_name`` and ``pipeline``
    (wrapped in ``staticmethod``).
    """

    serializer_class: Type[serializers.Serializer]
    pipeline: Pipeline
    command_name: str

    def add_arguments(self, parser: ArgumentParser) -> None:
        parser.add_argument(
            "--config", required=True, help="Path of the JSON run configuration."
        )
        parser.add_argument(
            "--out",
            default=None,
            help="Output directory (default: the configured OUTPUT_DIR).",
        )
        parser.add_argument(
            "--seed", type=int, default=None, help="Override the configured seed."
        )
        parser.add_argument(
            "--threads", type=int, default=None, help="Worker threads."
        )

    @handle_pathwise_errors
    def handle(self, *args: Any, **options: Any) -> None:
        logging.getLogger("django_pathwise_gp").setLevel(
            VERBOSITY_LEVELS.get(options.get("verbosity", 1), logging.DEBUG)
        )
        run_config = read_run_config(options["config"])
        if options["seed"] is not None:
            run_config["seed"] = options["seed"]
        threads = options["threads"]
        if threads is not None and threads < 1:
            raise serializers.ValidationError({"threads": ["Must be at least 1."]})

        serializer = self.serializer_class(data=run_config)
        serializer.is_valid(raise_exception=True)
        attrs = serializer.validated_data

        store = ArtifactStore(options["out"])
        store.write_metadata(self.command_name, run_config, attrs["seed"])

        configured_threads = config.threads
        if threads is not None:
            config.threads = threads
        try:
            self.pipeline(attrs, store, threads)
        finally:
            config.threads = configured_threads
        self.stdout.write(
            self.style.SUCCESS(
                f"{self.command_name}: outputs written to {store.out_dir}"
            )
        )
