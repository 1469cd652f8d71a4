from typing import Callable, Sequence, Tuple, Union

import numpy as np

# Type aliases shared across the numerical modules
Array = np.ndarray
Seed = Union[int, Sequence[int]]
Indices = np.ndarray
ColumnRef = Union[str, int]
GradientFn = Callable[[np.ndarray, np.random.Generator], np.ndarray]
Moments = Tuple[np.ndarray, np.ndarray]
