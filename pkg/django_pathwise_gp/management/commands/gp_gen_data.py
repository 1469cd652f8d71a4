from django_pathwise_gp.api.serializers import GenDataConfigSerializer
from django_pathwise_gp.management.base import PathwiseCommand
from django_pathwise_gp.runs.gen_data import run_gen_data


class Command(PathwiseCommand):
    help = "Write a built-in synthetic dataset as CSV."

    serializer_class = GenDataConfigSerializer
    command_name = "gen-data"
    pipeline = staticmethod(run_gen_data)
