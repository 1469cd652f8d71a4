from .error_paths import flatten_errors
