from __future__ import annotations

from typing import Any, Dict, Mapping

import numpy as np
from pyroaring import FrozenBitMap

from . import Component
from ..exceptions import NonFiniteException
from ..exceptions import ShapeMismatchException
from ..numerics.matrix import FloatArray, Matrix


def _vet_size(kind: str, h: int, w: int, n: int) -> None:
    if h < 1 or w < 1 or n != h * w:
        raise ShapeMismatchException(Component.WeightGen, kind, (h, w), (n,))


class WeightMap:
    """Per-cell positive emphasis field; background cells carry 1, foreground 1 + alpha"""

    __slots__ = ("_h", "_w", "_values")

    @classmethod
    def uniform(cls, h: int, w: int, value: float = 1.0) -> WeightMap:
        return cls(h, w, np.full(h * w, float(value)))

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> WeightMap:
        return cls(int(d["h"]), int(d["w"]), np.asarray(d["values"], dtype=np.float64))

    def __init__(self, h: int, w: int, values: Any) -> None:
        v = np.array(values, dtype=np.float64).reshape(-1)
        _vet_size("WeightMap", h, w, v.size)
        if not np.all(np.isfinite(v)):
            raise NonFiniteException(Component.WeightGen, "WeightMap")
        if not np.all(v > 0.0):
            raise ValueError("WeightMap values must be > 0")
        v.flags.writeable = False
        self._h = int(h)
        self._w = int(w)
        self._values: FloatArray = v

    def __repr__(self) -> str:
        return f"WeightMap({self._h}x{self._w}, fg={len(self.foreground())})"

    def __len__(self) -> int:
        return self._values.size

    @property
    def h(self) -> int:
        return self._h

    @property
    def w(self) -> int:
        return self._w

    @property
    def values(self) -> FloatArray:
        return self._values

    def as_column(self) -> Matrix:
        return Matrix(self._values.reshape(-1, 1))

    def as_grid(self) -> FloatArray:
        return self._values.reshape(self._h, self._w).copy()

    def foreground(self) -> FrozenBitMap:
        """Cells weighted above the background baseline of 1"""
        return FrozenBitMap(np.flatnonzero(self._values > 1.0).tolist())

    def is_uniform(self) -> bool:
        return bool(np.all(self._values == self._values[0]))

    def to_dict(self) -> Dict[str, Any]:
        return {"h": self._h, "w": self._w, "values": self._values.tolist()}


class SegMask:
    """
    Per-cell foreground probabilities from the light decoder. probs is an hw x 1 Matrix
    and may be tracked, so losses over the mask differentiate back into the decoder.
    """

    __slots__ = ("_h", "_w", "_probs")

    @classmethod
    def from_array(cls, h: int, w: int, probs: Any) -> SegMask:
        return cls(h, w, Matrix(np.asarray(probs, dtype=np.float64).reshape(-1, 1)))

    @classmethod
    def zeros(cls, h: int, w: int) -> SegMask:
        return cls(h, w, Matrix.zeros(h * w, 1))

    def __init__(self, h: int, w: int, probs: Matrix) -> None:
        if probs.cols != 1:
            raise ShapeMismatchException(Component.WeightGen, "SegMask", (h, w), probs.shape)
        _vet_size("SegMask", h, w, probs.rows)
        d = probs.data
        if np.any(d < 0.0) or np.any(d > 1.0):
            raise ValueError("SegMask probabilities must lie in [0, 1]")
        self._h = int(h)
        self._w = int(w)
        self._probs = probs

    def __repr__(self) -> str:
        return f"SegMask({self._h}x{self._w})"

    @property
    def h(self) -> int:
        return self._h

    @property
    def w(self) -> int:
        return self._w

    @property
    def probs(self) -> Matrix:
        return self._probs

    def as_grid(self) -> FloatArray:
        return self._probs.numpy().reshape(self._h, self._w)

    def detach(self) -> SegMask:
        return SegMask(self._h, self._w, self._probs.detach())
