from typing import Any, Dict

from rest_framework import serializers

from django_pathwise_gp.api.serializers.fields import PositiveFloatField
from django_pathwise_gp.data.dataset import SplitSpec
from django_pathwise_gp.data.source import DataSource
from django_pathwise_gp.data.synthetic import GENERATORS
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelFamily
from django_pathwise_gp.mixins import RejectUnknownFieldsMixin
from django_pathwise_gp.oracle.hyperparameters import HyperparameterSearch

# Keyword arguments accepted by each built-in generator besides the seed
GENERATOR_OPTIONS = {
    "sinusoid": ("num_points", "noise_variance", "low", "high"),
    "infill": ("num_points", "noise_variance"),
    "grid": ("num_points", "noise_variance", "spacing"),
    "gp_prior": ("num_points", "num_features"),
}


class GeneratorSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    name = serializers.ChoiceField(choices=sorted(GENERATORS))
    num_points = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, required=False)
    noise_variance = serializers.FloatField(min_value=0.0, required=False)
    low = serializers.FloatField(required=False)
    high = serializers.FloatField(required=False)
    spacing = PositiveFloatField(required=False)
    num_features = serializers.IntegerField(min_value=2, required=False)

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        allowed = GENERATOR_OPTIONS[attrs["name"]] + ("name", "seed")
        unused = sorted(key for key in attrs if key not in allowed)
        if unused:
            raise serializers.ValidationError(
                {key: [f"Not used by the {attrs['name']} generator."] for key in unused}
            )
        return attrs


class SplitSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    train_fraction = serializers.FloatField(default=0.9)
    seed = serializers.IntegerField(min_value=0, default=0)

    def validate(self, attrs: Dict[str, Any]) -> SplitSpec:
        try:
            return SplitSpec(**attrs)
        except ConfigurationError as e:
            raise serializers.ValidationError(
                {"train_fraction": [str(e)]}
            ) from e


class DataSourceSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """A CSV file (``path`` plus ``target_column`` or ``target_index``) or a
    built-in ``generator``, with an optional ``split`` and standardization."""

    path = serializers.CharField(required=False)
    target_column = serializers.CharField(required=False)
    target_index = serializers.IntegerField(required=False)
    generator = GeneratorSerializer(required=False)
    split = SplitSerializer(required=False)
    standardize = serializers.BooleanField(default=False)

    def validate(self, attrs: Dict[str, Any]) -> DataSource:
        if "path" not in attrs and "generator" not in attrs:
            raise serializers.ValidationError({"path": ["This field is required."]})
        if "path" in attrs and "generator" in attrs:
            raise serializers.ValidationError(
                "Give either a CSV path or a generator, not both."
            )
        if "target_column" in attrs and "target_index" in attrs:
            raise serializers.ValidationError(
                {"target_index": ["Give target_column or target_index, not both."]}
            )
        generator = dict(attrs.get("generator") or {})
        name = generator.pop("name", None)
        target = attrs.get("target_index", attrs.get("target_column", "y"))
        return DataSource(
            path=attrs.get("path"),
            target_column=target,
            generator=name,
            generator_options=generator,
            split=attrs.get("split"),
            standardize=attrs["standardize"],
        )


class InducingSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """KNN inducing-point selection; ``lengthscale`` defaults to the smallest
    kernel lengthscale."""

    lengthscale = PositiveFloatField(required=False)
    neighbors = serializers.IntegerField(min_value=1, default=16)


class HyperparameterSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """Marginal-likelihood hyperparameter fitting.

    Fields:
        family: Kernel family to fit.
        sweeps: Coordinate sweeps of the line search.
        num_centroids: When given, fit on ``subset_size`` nearest neighbours
            of this many random centroids and average; otherwise fit on the
            whole training set.
        subset_size: Neighbourhood size per centroid.

    """

    family = serializers.ChoiceField(choices=[f.value for f in KernelFamily])
    sweeps = serializers.IntegerField(min_value=1, default=3)
    num_centroids = serializers.IntegerField(min_value=1, required=False)
    subset_size = serializers.IntegerField(min_value=2, required=False)

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        if ("num_centroids" in attrs) != ("subset_size" in attrs):
            raise serializers.ValidationError(
                "num_centroids and subset_size must be given together."
            )
        try:
            search = HyperparameterSearch(
                family=attrs["family"], sweeps=attrs["sweeps"]
            )
        except ConfigurationError as e:
            raise serializers.ValidationError(str(e)) from e
        return {
            "search": search,
            "num_centroids": attrs.get("num_centroids"),
            "subset_size": attrs.get("subset_size"),
        }
