from __future__ import annotations

import math
from typing import Dict, Final, Iterable, Optional, Sequence

import numpy as np

from ..exceptions import DegenerateGeometryException
from .homography import Homography

AUC_THRESHOLDS: Final = (3.0, 5.0, 10.0)


def image_corners(width: float, height: float) -> np.ndarray:
    return np.array([[0.0, 0.0], [width, 0.0], [width, height], [0.0, height]])


def corner_error(h_est: Optional[Homography], h_gt: Homography, width: float, height: float) -> float:
    """
    Mean distance between the four image corners mapped by h_est and by h_gt. A failed
    estimate (None, or one sending a corner to infinity) scores inf.
    """
    if h_est is None:
        return math.inf
    corners = image_corners(width, height)
    try:
        est = h_est.apply_points(corners)
    except DegenerateGeometryException:
        return math.inf
    gt = h_gt.apply_points(corners)
    return float(np.sqrt(((est - gt) ** 2).sum(axis=1)).mean())


def auc(errors: Sequence[float], threshold: float) -> float:
    """
    (1/t) times the integral over [0, t] of recall(x), recall(x) being the fraction of
    errors <= x. Recall is a step function, so the integral is exact:
    sum(max(0, t - e)) / (n t). Infinite errors contribute nothing.
    """
    if threshold <= 0.0:
        raise ValueError(f"threshold must be > 0, got {threshold}")
    if len(errors) == 0:
        raise ValueError("auc needs at least one error")
    e = np.asarray(errors, dtype=np.float64)
    e = np.where(np.isnan(e), np.inf, e)
    area = np.maximum(0.0, threshold - e).sum()
    return float(area / (len(e) * threshold))


def auc_summary(errors: Sequence[float], thresholds: Iterable[float] = AUC_THRESHOLDS) -> Dict[str, float]:
    """{"AUC3": ..., "AUC5": ..., "AUC10": ...}"""
    return {f"AUC{t:g}": auc(errors, t) for t in thresholds}
