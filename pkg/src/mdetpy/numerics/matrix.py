from __future__ import annotations

from typing import Any, Optional, Tuple, TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from ..elements import Component
from ..exceptions import NonFiniteException
from ..exceptions import ShapeMismatchException

if TYPE_CHECKING:
    from .tape import Tape

FloatArray = npt.NDArray[np.float64]


def as_float_array(data: Any) -> FloatArray:
    """
    Coerces data into a fresh 2-D float64 array; scalars become 1x1, vectors become columns
    """
    arr = np.array(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    elif arr.ndim != 2:
        raise ShapeMismatchException(Component.Numerics, "Matrix", arr.shape)
    return arr


class Matrix:
    """
    Immutable 64-bit row-major matrix. A Matrix created by a tracked operation remembers
    its Tape and node index so gradients can flow back to the leaves that produced it.
    """

    __slots__ = ("_data", "_tape", "_index")

    @classmethod
    def _wrap(cls, arr: FloatArray, tape: Optional[Tape] = None, index: int = -1) -> Matrix:
        # takes ownership of arr, no copy
        m = cls.__new__(cls)
        arr.flags.writeable = False
        m._data = arr
        m._tape = tape
        m._index = index
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls._wrap(np.zeros((rows, cols), dtype=np.float64))

    @classmethod
    def ones(cls, rows: int, cols: int) -> Matrix:
        return cls._wrap(np.ones((rows, cols), dtype=np.float64))

    @classmethod
    def column(cls, values: Any) -> Matrix:
        return cls(np.asarray(values, dtype=np.float64).reshape(-1, 1))

    @classmethod
    def row(cls, values: Any) -> Matrix:
        return cls(np.asarray(values, dtype=np.float64).reshape(1, -1))

    def __init__(self, data: Any) -> None:
        arr = as_float_array(data)
        if not np.all(np.isfinite(arr)):
            raise NonFiniteException(Component.Numerics, "Matrix")
        arr.flags.writeable = False
        self._data: FloatArray = arr
        self._tape: Optional[Tape] = None
        self._index = -1

    def __repr__(self) -> str:
        tracked = f", node={self._index}" if self.is_tracked else ""
        return f"Matrix({self.rows}x{self.cols}{tracked})"

    def __len__(self) -> int:
        return self.rows

    @property
    def data(self) -> FloatArray:
        return self._data

    @property
    def rows(self) -> int:
        return int(self._data.shape[0])

    @property
    def cols(self) -> int:
        return int(self._data.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def tape(self) -> Optional[Tape]:
        return self._tape

    @property
    def index(self) -> int:
        return self._index

    @property
    def is_tracked(self) -> bool:
        return self._tape is not None

    def item(self) -> float:
        if self.shape != (1, 1):
            raise ShapeMismatchException(Component.Numerics, "item", self.shape, (1, 1))
        return float(self._data[0, 0])

    def numpy(self) -> FloatArray:
        """Returns a writable copy of the values"""
        return np.array(self._data, dtype=np.float64)

    def detach(self) -> Matrix:
        return Matrix._wrap(self._data)

    # arithmetic sugar over the ops module
    @property
    def T(self) -> Matrix:
        from .ops import transpose

        return transpose(self)

    def __matmul__(self, other: Matrix) -> Matrix:
        from .ops import matmul

        return matmul(self, other)

    def __add__(self, other: Matrix | float) -> Matrix:
        from .ops import add

        return add(self, other if isinstance(other, Matrix) else Matrix(other))

    def __radd__(self, other: float) -> Matrix:
        return self.__add__(other)

    def __sub__(self, other: Matrix | float) -> Matrix:
        from .ops import add, scale

        return add(self, scale(other if isinstance(other, Matrix) else Matrix(other), -1.0))

    def __neg__(self) -> Matrix:
        from .ops import scale

        return scale(self, -1.0)

    def __mul__(self, other: Matrix | float) -> Matrix:
        from .ops import multiply, scale

        if isinstance(other, Matrix):
            return multiply(self, other)
        return scale(self, float(other))

    def __rmul__(self, other: float) -> Matrix:
        return self.__mul__(other)
