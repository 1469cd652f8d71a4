from django_pathwise_gp.api.serializers import SampleConfigSerializer
from django_pathwise_gp.management.base import PathwiseCommand
from django_pathwise_gp.runs.fit import run_sample


class Command(PathwiseCommand):
    help = "Fit a GP posterior and write pathwise predictions at query points."

    serializer_class = SampleConfigSerializer
    command_name = "sample"
    pipeline = staticmethod(run_sample)
