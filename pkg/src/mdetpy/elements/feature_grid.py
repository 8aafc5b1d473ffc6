from __future__ import annotations

from typing import Any, Tuple

import numpy as np

from . import Component
from ..exceptions import ShapeMismatchException
from ..numerics.matrix import FloatArray, Matrix


class FeatureGrid:
    """
    An h x w grid of c-channel cell features stored as an hw x c Matrix;
    row i holds cell i in row-major cell order
    """

    __slots__ = ("_h", "_w", "_values")

    @classmethod
    def from_array(cls, arr: Any) -> FeatureGrid:
        """Builds a grid from an h x w x c array"""
        a = np.asarray(arr, dtype=np.float64)
        if a.ndim != 3:
            raise ShapeMismatchException(Component.Numerics, "FeatureGrid.from_array", a.shape)
        h, w, c = a.shape
        return cls(h, w, Matrix(a.reshape(h * w, c)))

    @classmethod
    def zeros(cls, h: int, w: int, c: int) -> FeatureGrid:
        return cls(h, w, Matrix.zeros(h * w, c))

    def __init__(self, h: int, w: int, values: Matrix | Any) -> None:
        if not isinstance(values, Matrix):
            values = Matrix(values)
        if h < 1 or w < 1 or values.rows != h * w:
            raise ShapeMismatchException(Component.Numerics, "FeatureGrid", (h, w), values.shape)
        self._h = int(h)
        self._w = int(w)
        self._values = values

    def __repr__(self) -> str:
        return f"FeatureGrid({self._h}x{self._w}x{self.c})"

    @property
    def h(self) -> int:
        return self._h

    @property
    def w(self) -> int:
        return self._w

    @property
    def c(self) -> int:
        return self._values.cols

    @property
    def hw(self) -> int:
        return self._h * self._w

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self._h, self._w, self.c

    @property
    def values(self) -> Matrix:
        return self._values

    def with_values(self, values: Matrix) -> FeatureGrid:
        return FeatureGrid(self._h, self._w, values)

    def detach(self) -> FeatureGrid:
        return FeatureGrid(self._h, self._w, self._values.detach())

    def numpy(self) -> FloatArray:
        """h x w x c copy of the values"""
        return self._values.numpy().reshape(self._h, self._w, self.c)

    def cell_index(self, row: int, col: int) -> int:
        return row * self._w + col

    def cell_coords(self, i: int) -> Tuple[int, int]:
        return divmod(i, self._w)
