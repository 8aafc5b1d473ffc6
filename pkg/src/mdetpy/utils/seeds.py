from __future__ import annotations

from typing import Final

import numpy as np

_MASK64: Final = (1 << 64) - 1


def splitmix64(x: int) -> int:
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *stream: int) -> int:
    """
    Independent 63-bit seed for (seed, stream...); used to give every sample, split
    and component its own generator without correlating neighbouring indices
    """
    s = splitmix64(seed & _MASK64)
    for k in stream:
        s = splitmix64(s ^ (k & _MASK64))
    return s >> 1


def rng_for(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *stream))
