"""Run pipelines behind the management commands."""
