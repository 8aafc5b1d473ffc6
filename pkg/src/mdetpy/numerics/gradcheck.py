from __future__ import annotations

from typing import Callable, Dict, Mapping

import numpy as np

from .matrix import FloatArray, Matrix
from .tape import Tape

DEFAULT_STEP = 1e-5
ERROR_FLOOR = 1e-3


def finite_diff_grad(f: Callable[[FloatArray], float], x: FloatArray, h: float = DEFAULT_STEP) -> FloatArray:
    """Central differences (f(x + h e_i) - f(x - h e_i)) / 2h, one coordinate at a time"""
    if h <= 0.0:
        raise ValueError("finite difference step must be > 0")
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat, gflat = x.reshape(-1), grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        fp = float(f(x))
        flat[i] = orig - h
        fm = float(f(x))
        flat[i] = orig
        gflat[i] = (fp - fm) / (2.0 * h)
    return grad


def relative_error(a: FloatArray, b: FloatArray) -> float:
    """||a - b|| / max(||a||, ||b||, ERROR_FLOOR); near-zero gradients are compared absolutely"""
    denom = max(float(np.linalg.norm(a)), float(np.linalg.norm(b)), ERROR_FLOOR)
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b))) / denom


def check_gradients(
    build: Callable[[Dict[str, Matrix]], Matrix],
    inputs: Mapping[str, FloatArray],
    h: float = DEFAULT_STEP,
) -> float:
    """
    Compares tape gradients of the scalar build(inputs) with central finite differences
    for every named input. Returns the worst relative error.
    """
    tape = Tape()
    leaves = {name: tape.leaf(value, name) for name, value in inputs.items()}
    grads = tape.backward(build(leaves))

    worst = 0.0
    for name, value in inputs.items():
        base = {k: np.asarray(v, dtype=np.float64) for k, v in inputs.items()}

        def f(x: FloatArray, _name: str = name) -> float:
            args = {k: Matrix(x if k == _name else v) for k, v in base.items()}
            return build(args).item()

        numeric = finite_diff_grad(f, base[name], h)
        worst = max(worst, relative_error(grads[leaves[name]], numeric))
    return worst
