from django_pathwise_gp.api.serializers import BenchmarkConfigSerializer
from django_pathwise_gp.management.base import PathwiseCommand
from django_pathwise_gp.runs.benchmark import run_benchmark


class Command(PathwiseCommand):
    help = "Compare inference methods across datasets and noise regimes."

    serializer_class = BenchmarkConfigSerializer
    command_name = "benchmark"
    pipeline = staticmethod(run_benchmark)
