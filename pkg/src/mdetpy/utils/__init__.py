from __future__ import annotations

from .decorators import timer as timer
from .seeds import derive_seed as derive_seed
from .seeds import rng_for as rng_for
from .seeds import splitmix64 as splitmix64
