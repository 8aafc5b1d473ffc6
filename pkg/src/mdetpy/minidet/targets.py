from __future__ import annotations

from typing import Sequence

import attrs
import numpy as np

from ..elements import BBox
from ..geometry import cell_centers
from ..numerics import FloatArray


@attrs.frozen(eq=False)
class DenseTargets:
    """
    Per-cell supervision. objectness is 1 for positives; class_ids holds 1..C for
    positives and 0 elsewhere; regression holds l, t, r, b in pixels (zero for
    negatives); assigned indexes the source box or is -1.
    """

    h: int
    w: int
    stride: float
    objectness: FloatArray
    class_ids: np.ndarray
    regression: FloatArray
    assigned: np.ndarray

    @property
    def positives(self) -> np.ndarray:
        return np.flatnonzero(self.objectness > 0.0)

    @property
    def num_positives(self) -> int:
        return int((self.objectness > 0.0).sum())


def assign_targets(boxes: Sequence[BBox], h: int, w: int, stride: float = 1.0) -> DenseTargets:
    """
    A cell is positive when its center lies strictly inside a box; when several boxes
    contain it the smallest one wins, ties going to the earlier box
    """
    hw = h * w
    centers = cell_centers(h, w, stride)
    assigned = np.full(hw, -1, dtype=int)
    best_area = np.full(hw, np.inf)
    for k, b in enumerate(boxes):
        inside = (
            (centers[:, 0] > b.x1) & (centers[:, 0] < b.x2) & (centers[:, 1] > b.y1) & (centers[:, 1] < b.y2)
        )
        take = inside & (b.area < best_area)
        assigned[take] = k
        best_area[take] = b.area

    objectness = (assigned >= 0).astype(np.float64)
    class_ids = np.zeros(hw, dtype=int)
    regression = np.zeros((hw, 4))
    for i in np.flatnonzero(assigned >= 0):
        b = boxes[assigned[i]]
        cx, cy = centers[i]
        class_ids[i] = b.class_id
        regression[i] = (cx - b.x1, cy - b.y1, b.x2 - cx, b.y2 - cy)
    return DenseTargets(h, w, float(stride), objectness, class_ids, regression, assigned)
