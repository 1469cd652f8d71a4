from django_pathwise_gp.api.serializers import FitConfigSerializer
from django_pathwise_gp.management.base import PathwiseCommand
from django_pathwise_gp.runs.fit import run_fit


class Command(PathwiseCommand):
    help = "Fit GP posterior weights and report test metrics."

    serializer_class = FitConfigSerializer
    command_name = "fit"
    pipeline = staticmethod(run_fit)
