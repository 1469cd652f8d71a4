from typing import Any, Dict

from rest_framework import serializers

from django_pathwise_gp.api.serializers.fields import PositiveFloatField
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.mixins import RejectUnknownFieldsMixin
from django_pathwise_gp.solvers.cg import CgConfig


class SgdConfigSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """SGD overrides; omitted fields fall back to the configured defaults.

    The validated value is the dict of given overrides, which the command
    completes with the run seed through ``SgdConfig.for_mean`` or
    ``SgdConfig.for_samples``.
    """

    steps = serializers.IntegerField(min_value=1, required=False)
    learning_rate = PositiveFloatField(required=False)
    batch_size = serializers.IntegerField(min_value=1, required=False)
    momentum = serializers.FloatField(min_value=0.0, max_value=0.999, required=False)
    regularizer_features = serializers.IntegerField(min_value=0, required=False)
    polyak_averaging = serializers.BooleanField(required=False)
    trace_every = serializers.IntegerField(min_value=1, required=False)
    divergence_threshold = PositiveFloatField(required=False)

    def validate_regularizer_features(self, value: int) -> int:
        if value % 2:
            raise serializers.ValidationError("Ensure this value is even.")
        return value


class CgConfigSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    max_iters = serializers.IntegerField(min_value=1, required=False)
    tolerance = PositiveFloatField(required=False)
    preconditioner_rank = serializers.IntegerField(min_value=0, required=False)
    snapshot_every = serializers.IntegerField(min_value=0, required=False)

    def validate(self, attrs: Dict[str, Any]) -> CgConfig:
        try:
            return CgConfig(**attrs)
        except ConfigurationError as e:
            raise serializers.ValidationError(str(e)) from e
