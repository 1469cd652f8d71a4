from typing import Any, Dict

from rest_framework import serializers

from django_pathwise_gp.api.serializers.fields import PositiveFloatField
from django_pathwise_gp.kernels.spec import KernelFamily
from django_pathwise_gp.mixins import RejectUnknownFieldsMixin
from django_pathwise_gp.thompson.config import Backend


class ThompsonConfigSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """Fields of :class:`ThompsonConfig` except the seed; omitted fields keep
    the dataclass defaults."""

    dim = serializers.IntegerField(min_value=1, required=False)
    lengthscale = PositiveFloatField(required=False)
    batch_size = serializers.IntegerField(min_value=1, required=False)
    steps = serializers.IntegerField(min_value=1, required=False)
    initial_points = serializers.IntegerField(min_value=1, required=False)
    uniform_fraction = serializers.FloatField(
        min_value=0.0, max_value=1.0, required=False
    )
    candidates_per_round = serializers.IntegerField(min_value=1, required=False)
    rounds = serializers.IntegerField(min_value=1, required=False)
    top_k = serializers.IntegerField(min_value=1, required=False)
    ascent_steps = serializers.IntegerField(min_value=1, required=False)
    ascent_learning_rate = PositiveFloatField(required=False)
    observation_noise = serializers.FloatField(min_value=0.0, required=False)
    noise_variance = PositiveFloatField(required=False)
    signal_variance = PositiveFloatField(required=False)
    family = serializers.ChoiceField(
        choices=[f.value for f in KernelFamily], required=False
    )
    num_features = serializers.IntegerField(min_value=2, required=False)
    backend = serializers.ChoiceField(
        choices=[b.value for b in Backend], required=False
    )
    warm_start = serializers.BooleanField(required=False)
    sgd_steps = serializers.IntegerField(min_value=1, required=False)
    sgd_batch_size = serializers.IntegerField(min_value=1, required=False)
    mean_learning_rate = PositiveFloatField(required=False)
    sample_learning_rate = PositiveFloatField(required=False)
    cg_iters = serializers.IntegerField(min_value=1, required=False)

    def validate_num_features(self, value: int) -> int:
        if value % 2:
            raise serializers.ValidationError("Ensure this value is even.")
        return value

    def validate(self, attrs: Dict[str, Any]) -> Dict[str, Any]:
        return dict(attrs)
