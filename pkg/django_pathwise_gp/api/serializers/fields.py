from rest_framework import serializers


class PositiveFloatField(serializers.FloatField):
    """A float that must be strictly greater than zero."""

    default_error_messages = {
        "not_positive": "Ensure this value is greater than 0.",
    }

    def to_internal_value(self, data: object) -> float:
        value = super().to_internal_value(data)
        if not value > 0:
            self.fail("not_positive")
        return value
