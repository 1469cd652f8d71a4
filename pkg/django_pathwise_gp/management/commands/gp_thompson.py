from django_pathwise_gp.api.serializers import ThompsonRunConfigSerializer
from django_pathwise_gp.management.base import PathwiseCommand
from django_pathwise_gp.runs.thompson import run_thompson


class Command(PathwiseCommand):
    help = "Run parallel Thompson sampling on GP prior targets."

    serializer_class = ThompsonRunConfigSerializer
    command_name = "thompson"
    pipeline = staticmethod(run_thompson)
