"""
The closed set of differentiable matrix operations. Every learnable computation in
mdetpy is composed from these; each records itself on the operands' tape when any
operand is tracked and otherwise evaluates eagerly.
"""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..elements import Component
from ..exceptions import NonFiniteException
from ..exceptions import ShapeMismatchException
from .matrix import FloatArray, Matrix
from .tape import Tape, VJP

LAYER_NORM_EPS = 1e-6


def _tape_of(operands: Sequence[Matrix]) -> Optional[Tape]:
    for m in operands:
        if m.tape is not None:
            return m.tape
    return None


def _result(op: str, value: FloatArray, operands: Sequence[Matrix], vjp: VJP) -> Matrix:
    if not np.all(np.isfinite(value)):
        raise NonFiniteException(Component.Numerics, op)
    tape = _tape_of(operands)
    if tape is None:
        return Matrix._wrap(value)
    return tape.record(value, operands, vjp)


def _unbroadcast(g: FloatArray, shape: tuple[int, int]) -> FloatArray:
    if g.shape == shape:
        return g
    axes = tuple(ax for ax in (0, 1) if shape[ax] == 1 and g.shape[ax] != 1)
    return g.sum(axis=axes, keepdims=True) if axes else g


def _vet_broadcast(op: str, a: Matrix, b: Matrix) -> None:
    for ax in (0, 1):
        if a.shape[ax] != b.shape[ax] and 1 not in (a.shape[ax], b.shape[ax]):
            raise ShapeMismatchException(Component.Numerics, op, a.shape, b.shape)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ShapeMismatchException(Component.Numerics, "matmul", a.shape, b.shape)
    av, bv = a.data, b.data

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        return g @ bv.T, av.T @ g

    return _result("matmul", av @ bv, (a, b), vjp)


def transpose(a: Matrix) -> Matrix:
    return _result("transpose", np.ascontiguousarray(a.data.T), (a,), lambda g: (g.T,))


def add(a: Matrix, b: Matrix) -> Matrix:
    """Element-wise sum with row/column broadcasting"""
    _vet_broadcast("add", a, b)
    sa, sb = a.shape, b.shape

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        return _unbroadcast(g, sa), _unbroadcast(g, sb)

    return _result("add", a.data + b.data, (a, b), vjp)


def subtract(a: Matrix, b: Matrix) -> Matrix:
    return add(a, scale(b, -1.0))


def multiply(a: Matrix, b: Matrix) -> Matrix:
    """
    Broadcasting element-wise product; an hw x 1 weight column against an hw x c grid
    scales every channel of a row by that row's weight
    """
    _vet_broadcast("multiply", a, b)
    av, bv = a.data, b.data

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        return _unbroadcast(g * bv, av.shape), _unbroadcast(g * av, bv.shape)

    return _result("multiply", av * bv, (a, b), vjp)


def scale(a: Matrix, c: float) -> Matrix:
    c = float(c)
    return _result("scale", a.data * c, (a,), lambda g: (g * c,))


def softmax_rows(m: Matrix) -> Matrix:
    if m.rows == 0 or m.cols == 0:
        return _result("softmax_rows", np.zeros(m.shape), (m,), lambda g: (g,))
    x = m.data - m.data.max(axis=1, keepdims=True)
    e = np.exp(x)
    y = e / e.sum(axis=1, keepdims=True)

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        return (y * (g - (g * y).sum(axis=1, keepdims=True)),)

    return _result("softmax_rows", y, (m,), vjp)


def softmax_cols(m: Matrix) -> Matrix:
    return transpose(softmax_rows(transpose(m)))


def cosine_rows(a: Matrix, b: Matrix) -> Matrix:
    """
    Per-row cosine similarity as an n x 1 column; rows where either side has zero norm
    yield 0. Output is clamped to [-1, 1].
    """
    if a.shape != b.shape:
        raise ShapeMismatchException(Component.Numerics, "cosine_rows", a.shape, b.shape)
    av, bv = a.data, b.data
    na = np.sqrt((av * av).sum(axis=1))
    nb = np.sqrt((bv * bv).sum(axis=1))
    valid = (na > 0.0) & (nb > 0.0)
    na_s = np.where(valid, na, 1.0)
    nb_s = np.where(valid, nb, 1.0)
    dot = (av * bv).sum(axis=1)
    cos = np.clip(np.where(valid, dot / (na_s * nb_s), 0.0), -1.0, 1.0)

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        gc = np.where(valid, g[:, 0], 0.0)[:, None]
        c = cos[:, None]
        da = gc * (bv / (na_s * nb_s)[:, None] - c * av / (na_s * na_s)[:, None])
        db = gc * (av / (na_s * nb_s)[:, None] - c * bv / (nb_s * nb_s)[:, None])
        return da, db

    return _result("cosine_rows", cos[:, None], (a, b), vjp)


def normalize_rows(a: Matrix) -> Matrix:
    """Scales every row to unit L2 norm; zero rows stay zero"""
    av = a.data
    n = np.sqrt((av * av).sum(axis=1, keepdims=True))
    valid = n > 0.0
    n_s = np.where(valid, n, 1.0)
    y = np.where(valid, av / n_s, 0.0)

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        return (np.where(valid, (g - y * (g * y).sum(axis=1, keepdims=True)) / n_s, 0.0),)

    return _result("normalize_rows", y, (a,), vjp)


def logistic(a: Matrix) -> Matrix:
    y = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return _result("logistic", y, (a,), lambda g: (g * y * (1.0 - y),))


def relu(a: Matrix) -> Matrix:
    mask = a.data > 0.0
    return _result("relu", np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def abs_(a: Matrix) -> Matrix:
    """|x| composed as relu(x) + relu(-x)"""
    return add(relu(a), relu(scale(a, -1.0)))


def exp(a: Matrix) -> Matrix:
    with np.errstate(over="ignore"):
        y = np.exp(a.data)
    return _result("exp", y, (a,), lambda g: (g * y,))


def log(a: Matrix) -> Matrix:
    av = a.data
    if av.size and not np.all(av > 0.0):
        raise NonFiniteException(Component.Numerics, "log", "log of a non-positive value")
    return _result("log", np.log(av), (a,), lambda g: (g / av,))


def reciprocal(a: Matrix) -> Matrix:
    av = a.data
    if av.size and np.any(av == 0.0):
        raise NonFiniteException(Component.Numerics, "reciprocal", "reciprocal of zero")
    y = 1.0 / av
    return _result("reciprocal", y, (a,), lambda g: (-g * y * y,))


def layer_norm(a: Matrix, gain: Matrix, offset: Matrix, eps: float = LAYER_NORM_EPS) -> Matrix:
    """Per-row normalization to zero mean and unit (biased) variance, then gain * x + offset"""
    if gain.shape != (1, a.cols) or offset.shape != (1, a.cols):
        raise ShapeMismatchException(Component.Numerics, "layer_norm", a.shape, gain.shape, offset.shape)
    av, gv = a.data, gain.data
    xc = av - av.mean(axis=1, keepdims=True)
    inv = 1.0 / np.sqrt((xc * xc).mean(axis=1, keepdims=True) + eps)
    xhat = xc * inv
    y = xhat * gv + offset.data

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        dxhat = g * gv
        da = inv * (
            dxhat - dxhat.mean(axis=1, keepdims=True) - xhat * (dxhat * xhat).mean(axis=1, keepdims=True)
        )
        return da, (g * xhat).sum(axis=0, keepdims=True), g.sum(axis=0, keepdims=True)

    return _result("layer_norm", y, (a, gain, offset), vjp)


def sum_along(a: Matrix, axis: Optional[int] = None) -> Matrix:
    """Sum over all entries (1x1), over rows (axis=0, 1 x cols) or over columns (axis=1, rows x 1)"""
    shape = a.shape
    if axis is None:
        y = np.array([[a.data.sum()]])
    elif axis in (0, 1):
        y = a.data.sum(axis=axis, keepdims=True)
    else:
        raise ShapeMismatchException(Component.Numerics, f"sum_along(axis={axis})", shape)
    return _result("sum", y, (a,), lambda g: (np.broadcast_to(g, shape).copy(),))


def sum_all(a: Matrix) -> Matrix:
    return sum_along(a, None)


def mean_along(a: Matrix, axis: Optional[int] = None) -> Matrix:
    n = a.rows * a.cols if axis is None else a.shape[axis]
    return scale(sum_along(a, axis), 1.0 / n if n else 0.0)


def mean_all(a: Matrix) -> Matrix:
    return mean_along(a, None)


def max_along(a: Matrix, axis: int) -> Matrix:
    """Maximum along an axis; the sub-gradient goes to the first maximizer"""
    if axis not in (0, 1) or a.shape[axis] == 0:
        raise ShapeMismatchException(Component.Numerics, f"max_along(axis={axis})", a.shape)
    av = a.data
    arg = av.argmax(axis=axis)
    y = av.max(axis=axis, keepdims=True)

    def vjp(g: FloatArray) -> Sequence[Optional[FloatArray]]:
        da = np.zeros_like(av)
        if axis == 0:
            da[arg, np.arange(av.shape[1])] = g[0]
        else:
            da[np.arange(av.shape[0]), arg] = g[:, 0]
        return (da,)

    return _result("max_along", y, (a,), vjp)


def reshape(a: Matrix, rows: int, cols: int) -> Matrix:
    if rows * cols != a.rows * a.cols:
        raise ShapeMismatchException(Component.Numerics, "reshape", a.shape, (rows, cols))
    shape = a.shape
    return _result("reshape", a.data.reshape(rows, cols).copy(), (a,), lambda g: (g.reshape(shape),))
