from django_pathwise_gp.api.serializers import DiagnoseConfigSerializer
from django_pathwise_gp.management.base import PathwiseCommand
from django_pathwise_gp.runs.diagnose import run_diagnose


class Command(PathwiseCommand):
    help = "Spectral error diagnostics of SGD against the exact solution."

    serializer_class = DiagnoseConfigSerializer
    command_name = "diagnose"
    pipeline = staticmethod(run_diagnose)
