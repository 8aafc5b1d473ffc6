from __future__ import annotations

from itertools import combinations
from typing import Final, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pyroaring import BitMap

from ..exceptions import DegenerateGeometryException
from ..exceptions import EstimationFailureException
from ..numerics import FloatArray
from .homography import Correspondence, Homography, as_point_arrays, project

MIN_SAMPLE: Final = 4
RANSAC_ITERS: Final = 1000
RANSAC_INLIER_PX: Final = 3.0
RANSAC_CONFIDENCE: Final = 0.999

_RANK_TOL: Final = 1e-12
_COLLINEAR_TOL: Final = 1e-9


def _normalize_2d(pts: FloatArray) -> Tuple[FloatArray, FloatArray]:
    """Moves the centroid to the origin and scales the mean radius to sqrt(2)"""
    c = pts.mean(axis=0)
    d = float(np.sqrt(((pts - c) ** 2).sum(axis=1)).mean())
    if d <= _RANK_TOL:
        raise DegenerateGeometryException("All points coincide")
    s = np.sqrt(2.0) / d
    t = np.array([[s, 0.0, -s * c[0]], [0.0, s, -s * c[1]], [0.0, 0.0, 1.0]])
    return (pts - c) * s, t


def _has_collinear_triple(pts: FloatArray) -> bool:
    for a, b, c in combinations(range(len(pts)), 3):
        u, v = pts[b] - pts[a], pts[c] - pts[a]
        if abs(u[0] * v[1] - u[1] * v[0]) <= _COLLINEAR_TOL:
            return True
    return False


def _build_system(xy: FloatArray, uv: FloatArray) -> FloatArray:
    x, y = xy[:, 0], xy[:, 1]
    u, v = uv[:, 0], uv[:, 1]
    n = len(xy)
    zeros, ones = np.zeros(n), np.ones(n)
    a = np.zeros((2 * n, 9))
    a[0::2] = np.c_[x, y, ones, zeros, zeros, zeros, -u * x, -u * y, -u]
    a[1::2] = np.c_[zeros, zeros, zeros, x, y, ones, -v * x, -v * y, -v]
    return a


def dlt_from_points(ref: FloatArray, tgt: FloatArray) -> Homography:
    """Hartley-normalized DLT mapping ref (n x 2) onto tgt (n x 2)"""
    n = len(ref)
    if n < MIN_SAMPLE or len(tgt) != n:
        raise EstimationFailureException(n, "DLT needs at least 4 correspondences")
    ref_n, t_r = _normalize_2d(ref)
    tgt_n, t_t = _normalize_2d(tgt)
    if n == MIN_SAMPLE and (_has_collinear_triple(ref_n) or _has_collinear_triple(tgt_n)):
        raise DegenerateGeometryException("Three of the four points are collinear")

    _, s, vt = np.linalg.svd(_build_system(ref_n, tgt_n))
    if s[7] <= _RANK_TOL * s[0]:
        raise DegenerateGeometryException("DLT system is rank deficient")
    hn = vt[-1].reshape(3, 3)
    return Homography(np.linalg.inv(t_t) @ hn @ t_r)


def estimate_dlt(corrs: Sequence[Correspondence]) -> Homography:
    ref, tgt = as_point_arrays(corrs)
    return dlt_from_points(ref, tgt)


def reprojection_errors(h: Homography, ref: FloatArray, tgt: FloatArray) -> FloatArray:
    """Distance between h(ref) and tgt per row; points sent to infinity score inf"""
    with np.errstate(invalid="ignore"):
        d = project(h.matrix, ref) - tgt
        err = np.sqrt((d * d).sum(axis=1))
    return np.where(np.isfinite(err), err, np.inf)


def ransac_homography(
    corrs: Sequence[Correspondence],
    iters: int = RANSAC_ITERS,
    inlier_px: float = RANSAC_INLIER_PX,
    seed: int = 0,
    confidence: Optional[float] = RANSAC_CONFIDENCE,
) -> Tuple[Homography, BitMap]:
    """
    Best-consensus homography over minimal samples of 4, refit by DLT on the winning
    inlier set. The iteration budget shrinks as the inlier ratio improves when a
    confidence is given. Returned inliers are measured against the refit model.
    Deterministic for a given seed.
    """
    n = len(corrs)
    if n < MIN_SAMPLE:
        raise EstimationFailureException(n)
    ref, tgt = as_point_arrays(corrs)
    rng = np.random.default_rng(seed)

    best: Optional[np.ndarray] = None
    best_count = MIN_SAMPLE - 1
    budget = iters
    it = 0
    while it < budget:
        it += 1
        idx = rng.choice(n, size=MIN_SAMPLE, replace=False)
        try:
            h = dlt_from_points(ref[idx], tgt[idx])
        except (DegenerateGeometryException, EstimationFailureException):
            continue
        inliers = reprojection_errors(h, ref, tgt) <= inlier_px
        count = int(inliers.sum())
        if count > best_count:
            best, best_count = inliers, count
            if confidence is not None and 0.0 < confidence < 1.0:
                w = count / n
                if w >= 1.0:
                    budget = it
                else:
                    denom = np.log(1.0 - w**MIN_SAMPLE)
                    if denom < 0.0:
                        budget = min(iters, int(np.ceil(np.log(1.0 - confidence) / denom)))

    if best is None:
        raise EstimationFailureException(n, f"No model reached {MIN_SAMPLE} inliers in {it} iterations")
    inlier_idx = np.flatnonzero(best)
    try:
        h = dlt_from_points(ref[inlier_idx], tgt[inlier_idx])
    except DegenerateGeometryException as e:
        raise EstimationFailureException(n, f"Inlier refit failed: {e.message}") from e
    # inliers are reported against the refit model, not the winning sample
    final = np.flatnonzero(reprojection_errors(h, ref, tgt) <= inlier_px)
    logger.debug(
        "RANSAC: {k}/{n} inliers after {it} iterations ({s} at sampling)", k=len(final), n=n, it=it, s=best_count
    )
    return h, BitMap(final.tolist())
