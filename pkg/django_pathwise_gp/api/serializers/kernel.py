from typing import Any, Dict

from rest_framework import serializers

from django_pathwise_gp.api.serializers.fields import PositiveFloatField
from django_pathwise_gp.exceptions import ConfigurationError
from django_pathwise_gp.kernels.spec import KernelFamily, KernelSpec
from django_pathwise_gp.mixins import RejectUnknownFieldsMixin


class KernelSpecSerializer(RejectUnknownFieldsMixin, serializers.Serializer):
    """Validates a kernel block and produces a :class:`KernelSpec`.

    Fields:
        family: ``squared_exponential`` or ``matern32``.
        signal_variance: σ_f², strictly positive.
        lengthscales: One strictly positive lengthscale per input column.
        noise_variance: σ², strictly positive.

    """

    family = serializers.ChoiceField(choices=[f.value for f in KernelFamily])
    signal_variance = PositiveFloatField(default=1.0)
    lengthscales = serializers.ListField(child=PositiveFloatField(), min_length=1)
    noise_variance = PositiveFloatField()

    def validate(self, attrs: Dict[str, Any]) -> KernelSpec:
        try:
            return KernelSpec(
                family=attrs["family"],
                signal_variance=attrs["signal_variance"],
                lengthscales=tuple(attrs["lengthscales"]),
                noise_variance=attrs["noise_variance"],
            )
        except ConfigurationError as e:
            raise serializers.ValidationError(str(e)) from e
