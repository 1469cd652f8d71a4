from typing import Sequence, Union

import numpy as np


def make_rng(seed: Union[int, Sequence[int]], *keys: int) -> np.random.Generator:
    """Return an independent generator for the stream identified by
    ``(seed, *keys)``.

    Streams with different keys are statistically independent and every
    stream is reproducible from the run seed alone.

    Args:
        seed (int | Sequence[int]): Root entropy of the run.
        *keys (int): Stream identifiers, e.g. a stream constant and a slot index.

    Returns:
        np.random.Generator: A PCG64-backed generator.

    """
    entropy = [int(s) for s in seed] if isinstance(seed, (list, tuple)) else int(seed)
    sequence = np.random.SeedSequence(entropy, spawn_key=tuple(int(k) for k in keys))
    return np.random.default_rng(sequence)


def derive_seed(seed: Union[int, Sequence[int]], *keys: int) -> int:
    """Derive a plain integer seed for the stream ``(seed, *keys)``."""
    return int(make_rng(seed, *keys).integers(0, 2**63 - 1))
