"""Top-level serializers of the JSON run configurations, one per subcommand."""

from typing import Any, Dict

from rest_framework import serializers

from django_pathwise_gp.api.serializers.data import (
    DataSourceSerializer,
    HyperparameterSerializer,
    InducingSerializer,
)
from django_pathwise_gp.api.serializers.fields import PositiveFloatField
from django_pathwise_gp.api.serializers.kernel import KernelSpecSerializer
from django_pathwise_gp.api.serializers.solvers import (
    CgConfigSerializer,
    SgdConfigSerializer,
)
from django_pathwise_gp.api.serializers.thompson import ThompsonConfigSerializer
from django_pathwise_gp.mixins import RejectUnknownFieldsMixin
from django_pathwise_gp.settings.conf import config

METHODS = ("sgd", "sgd-inducing", "cg", "exact")
NOISE_REGIMES = ("tuned", "low")


class EvenIntegerField(serializers.IntegerField):
    default_error_messages = {"odd": "Ensure this value is even."}

    def to_internal_value(self, data: object) -> int:
        value = super().to_internal_value(data)
        if value % 2:
            self.fail("odd")
        return value


class QueryGridSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """A regular grid of query points: ``num_points`` per input dimension
    between ``low`` and ``high``, combined as a Cartesian product."""

    low = serializers.FloatField()
    high = serializers.FloatField()
    num_points = serializers.IntegerField(min_value=1, max_value=100000)

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        if not attrs["high"] > attrs["low"]:
            raise serializers.ValidationError(
                {"high": ["Ensure this value is greater than low."]}
            )
        return attrs


class RunConfigSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """Fields shared by every run configuration.

    Fields:
        format_version: Version tag of the configuration format; must equal
            the configured ``FORMAT_VERSION``.
        seed: Root seed of every random stream of the run.

    """

    format_version = serializers.IntegerField()
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate_format_version(self, value: int) -> int:
        if value != config.format_version:
            raise serializers.ValidationError(
                f"Unsupported format version {value}; "
                f"expected {config.format_version}."
            )
        return value


class FitConfigSerializer(RunConfigSerializer):
    """Configuration of ``fit``.

    Fields:
        data: Data source with an optional train/test split.
        kernel: Fixed kernel hyperparameters.
        hyperparameters: Marginal-likelihood fitting, instead of ``kernel``.
        method: ``sgd``, ``sgd-inducing``, ``cg`` or ``exact``.
        mean_sgd: SGD overrides for the mean weights.
        sample_sgd: SGD overrides for the sample weights.
        cg: CG settings.
        inducing: KNN inducing selection for ``sgd-inducing``.
        num_samples: Posterior samples; 0 fits the mean only.
        num_features: Fourier features per prior draw.
        compare_exact: Report metrics of the exact posterior next to the
            method's when N is within the oracle cap.

    """

    data = DataSourceSerializer()
    kernel = KernelSpecSerializer(required=False)
    hyperparameters = HyperparameterSerializer(required=False)
    method = serializers.ChoiceField(choices=METHODS, default="sgd")
    mean_sgd = SgdConfigSerializer(required=False)
    sample_sgd = SgdConfigSerializer(required=False)
    cg = CgConfigSerializer(required=False)
    inducing = InducingSerializer(required=False)
    num_samples = serializers.IntegerField(min_value=0, default=0)
    num_features = EvenIntegerField(min_value=2, required=False)
    compare_exact = serializers.BooleanField(default=True)

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        if ("kernel" in attrs) == ("hyperparameters" in attrs):
            raise serializers.ValidationError(
                {"kernel": ["Give exactly one of kernel and hyperparameters."]}
            )
        if attrs.get("num_samples") == 1:
            raise serializers.ValidationError(
                {"num_samples": ["A predictive variance needs at least 2 samples."]}
            )
        return attrs


class SampleConfigSerializer(FitConfigSerializer):
    """Configuration of ``sample``: a fit plus the points to predict at.

    Without ``query`` the test split, or else the training inputs, is used.
    """

    num_samples = serializers.IntegerField(min_value=2, default=64)
    query = QueryGridSerializer(required=False)
    write_samples = serializers.BooleanField(default=False)


class ErrorBoundSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """Injected-noise Polyak SGD run compared against the high-probability
    error bound.

    Fields:
        steps: Iterations t.
        learning_rate: Gradient-descent step size; defaults to half the
            stability limit.
        gradient_noise: Standard deviation G of the injected noise.
        delta: Failure probability of the bound.
        runs: Seeded repetitions.

    """

    steps = serializers.IntegerField(min_value=1, default=1000)
    learning_rate = PositiveFloatField(required=False)
    gradient_noise = serializers.FloatField(min_value=0.0, default=1.0)
    delta = serializers.FloatField(default=0.1)
    runs = serializers.IntegerField(min_value=1, default=200)

    def validate_delta(self, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("Ensure this value lies in (0, 1).")
        return value


class DiagnoseConfigSerializer(RunConfigSerializer):
    """Configuration of ``diagnose``.

    Fields:
        data: Data source; the training set must fit under the oracle cap.
        kernel: Kernel hyperparameters.
        mean_sgd: SGD overrides for the diagnosed mean weights.
        sample_sgd: SGD overrides for the sample weights of the W2 profile.
        num_samples: Posterior samples of the W2 profile.
        num_features: Fourier features per prior draw.
        query: Query grid of the W2 profile; defaults to the training inputs.
        error_bound: Optional injected-noise bound check.

    """

    data = DataSourceSerializer()
    kernel = KernelSpecSerializer()
    mean_sgd = SgdConfigSerializer(required=False)
    sample_sgd = SgdConfigSerializer(required=False)
    num_samples = serializers.IntegerField(min_value=2, required=False)
    num_features = EvenIntegerField(min_value=2, required=False)
    query = QueryGridSerializer(required=False)
    error_bound = ErrorBoundSerializer(required=False)


class BenchmarkDatasetSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    name = serializers.CharField()
    data = DataSourceSerializer()
    kernel = KernelSpecSerializer(required=False)
    hyperparameters = HyperparameterSerializer(required=False)

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        if ("kernel" in attrs) == ("hyperparameters" in attrs):
            raise serializers.ValidationError(
                {"kernel": ["Give exactly one of kernel and hyperparameters."]}
            )
        return attrs


class BenchmarkConfigSerializer(RunConfigSerializer):
    """Configuration of ``benchmark``: every method on every dataset under
    every noise regime.

    Fields:
        datasets: Named data sources with their kernels.
        methods: Subset of ``sgd``, ``sgd-inducing``, ``cg`` and ``exact``.
        regimes: ``tuned`` keeps the kernel's σ²; ``low`` replaces it.
        low_noise_variance: σ² of the ``low`` regime.
        num_samples: Posterior samples for the NLL.

    """

    datasets = BenchmarkDatasetSerializer(many=True, allow_empty=False)
    methods = serializers.ListField(
        child=serializers.ChoiceField(choices=METHODS), allow_empty=False
    )
    regimes = serializers.ListField(
        child=serializers.ChoiceField(choices=NOISE_REGIMES),
        allow_empty=False,
        default=lambda: ["tuned"],
    )
    low_noise_variance = PositiveFloatField(default=1e-6)
    mean_sgd = SgdConfigSerializer(required=False)
    sample_sgd = SgdConfigSerializer(required=False)
    cg = CgConfigSerializer(required=False)
    inducing = InducingSerializer(required=False)
    num_samples = serializers.IntegerField(min_value=2, default=16)
    num_features = EvenIntegerField(min_value=2, required=False)

    def validate_datasets(self, value: Any) -> Any:
        names = [entry["name"] for entry in value]
        if len(set(names)) != len(names):
            raise serializers.ValidationError("Dataset names must be unique.")
        return value


class ThompsonRunConfigSerializer(RunConfigSerializer):
    """Configuration of ``thompson``.

    Fields:
        thompson: Settings of every run.
        lengthscales: Optional lengthscale sweep; every value is run with
            every seed.
        seeds: Seeds of the sweep; defaults to the run seed alone.
        include_random: Also run equal-budget random search.

    """

    thompson = ThompsonConfigSerializer(required=False)
    lengthscales = serializers.ListField(
        child=PositiveFloatField(), allow_empty=False, required=False
    )
    seeds = serializers.ListField(
        child=serializers.IntegerField(min_value=0), allow_empty=False, required=False
    )
    include_random = serializers.BooleanField(default=False)


class GenDataConfigSerializer(RunConfigSerializer):
    """Configuration of ``gen-data``: a data source, written out as CSV.

    ``kernel`` is needed by the ``gp_prior`` generator only.
    """

    data = DataSourceSerializer()
    kernel = KernelSpecSerializer(required=False)
    target_name = serializers.CharField(default="y")

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        source = attrs["data"]
        if source.generator == "gp_prior" and "kernel" not in attrs:
            raise serializers.ValidationError(
                {"kernel": ["The gp_prior generator needs a kernel."]}
            )
        return attrs
