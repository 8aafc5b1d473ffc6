from __future__ import annotations

from typing import Final, Iterable, Tuple

import numpy as np

from ..numerics import Matrix
from ..numerics import ops

LOG_EPS: Final = 1e-12


def matcher_loss(p: Matrix, gt: Iterable[Tuple[int, int]], eps: float = LOG_EPS) -> Matrix:
    """-(1/|M|) sum over ground-truth (i, j) of log(P(i, j) + eps); 0 when M is empty"""
    pairs = set(gt)
    if not pairs:
        return Matrix.zeros(1, 1)
    select = np.zeros(p.shape)
    for i, j in pairs:
        if not (0 <= i < p.rows and 0 <= j < p.cols):
            raise IndexError(f"ground-truth match ({i}, {j}) outside a {p.rows}x{p.cols} probability matrix")
        select[i, j] = 1.0
    log_p = ops.log(ops.add(p, Matrix(eps)))
    return ops.scale(ops.sum_all(ops.multiply(log_p, Matrix(select))), -1.0 / len(pairs))
