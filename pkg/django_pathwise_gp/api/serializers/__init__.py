from django_pathwise_gp.api.serializers.commands import (
    BenchmarkConfigSerializer,
    DiagnoseConfigSerializer,
    FitConfigSerializer,
    GenDataConfigSerializer,
    SampleConfigSerializer,
    ThompsonRunConfigSerializer,
)
from django_pathwise_gp.api.serializers.data import DataSourceSerializer
from django_pathwise_gp.api.serializers.kernel import KernelSpecSerializer
from django_pathwise_gp.api.serializers.solvers import (
    CgConfigSerializer,
    SgdConfigSerializer,
)
from django_pathwise_gp.api.serializers.thompson import ThompsonConfigSerializer
