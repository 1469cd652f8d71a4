from typing import Any, Dict

from rest_framework import serializers


class RejectUnknownFieldsMixin:
    """A serializer mixin that turns unexpected keys into validation errors.

    DRF silently drops input keys that match no declared field; run
    configurations must be exact, so every undeclared key is reported under
    its own name. Nested serializers that use the mixin report their own
    unknown keys, which yields dotted paths such as ``kernel.lengthscale``.
    """

    def to_internal_value(self, data: Any) -> Dict[str, Any]:
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))  # type: ignore[attr-defined]
            if unknown:
                raise serializers.ValidationError(
                    {key: ["Unknown field."] for key in unknown}
                )
        return super().to_internal_value(data)  # type: ignore[misc]
