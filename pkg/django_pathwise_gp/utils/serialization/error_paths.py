from typing import Any, List


def flatten_errors(detail: Any, prefix: str = "") -> List[str]:
    """Flatten nested serializer errors into ``dotted.path: message`` lines.

    Args:
        detail (Any): ``serializer.errors`` or ``ValidationError.detail``; a
            mix of dicts (field names), lists (messages or list indices) and
            strings.
        prefix (str): Path accumulated so far.

    Returns:
        List[str]: One line per message, in the serializer's field order.

    """
    if isinstance(detail, dict):
        lines: List[str] = []
        for key, value in detail.items():
            path = str(key) if not prefix else f"{prefix}.{key}"
            if key == "non_field_errors" and prefix:
                path = prefix
            lines.extend(flatten_errors(value, path))
        return lines
    if isinstance(detail, list):
        if all(isinstance(item, str) for item in detail):
            return [f"{prefix or 'config'}: {item}" for item in detail]
        lines = []
        for index, item in enumerate(detail):
            if item in ({}, [], None, ""):
                continue
            path = f"{prefix}.{index}" if prefix else str(index)
            lines.extend(flatten_errors(item, path))
        return lines
    return [f"{prefix or 'config'}: {detail}"]
