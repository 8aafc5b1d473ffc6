from __future__ import annotations

from typing import Final, Optional, TypeVar, overload

import numpy as np

from ..elements import FeatureGrid
from ..elements import WeightMap
from ..numerics import FloatArray, Matrix
from .homography import Homography, project

_BOUNDS_TOL: Final = 1e-9

G = TypeVar("G", FeatureGrid, WeightMap)


def cell_homography(h: Homography, stride: float) -> Homography:
    """S H S^-1 with S = diag(1/stride, 1/stride, 1): the same map in cell units"""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    return h.conjugate_scale(1.0 / stride)


def cell_centers(h: int, w: int, stride: float = 1.0) -> FloatArray:
    """hw x 2 pixel centers (x, y) of the cells of an h x w grid in row-major order"""
    rows, cols = np.mgrid[0:h, 0:w]
    return np.c_[cols.ravel() + 0.5, rows.ravel() + 0.5] * float(stride)


def warp_array(src: FloatArray, h_cells: Homography, fill: float) -> FloatArray:
    """
    Inverse-warps an h x w x c array: every output cell center is mapped through
    h_cells^-1 and the source is sampled bilinearly; samples outside the source take fill
    """
    hh, ww = src.shape[0], src.shape[1]
    with np.errstate(invalid="ignore", over="ignore"):
        at = project(h_cells.inverse().matrix, cell_centers(hh, ww)) - 0.5
    ix, iy = at[:, 0], at[:, 1]
    finite = np.isfinite(ix) & np.isfinite(iy)
    ix = np.where(finite, ix, -1.0)
    iy = np.where(finite, iy, -1.0)
    inside = (
        finite
        & (ix >= -_BOUNDS_TOL)
        & (ix <= ww - 1 + _BOUNDS_TOL)
        & (iy >= -_BOUNDS_TOL)
        & (iy <= hh - 1 + _BOUNDS_TOL)
    )
    ix = np.clip(ix, 0.0, ww - 1)
    iy = np.clip(iy, 0.0, hh - 1)
    x0 = np.floor(ix).astype(int)
    y0 = np.floor(iy).astype(int)
    x1 = np.minimum(x0 + 1, ww - 1)
    y1 = np.minimum(y0 + 1, hh - 1)
    fx = (ix - x0)[:, None]
    fy = (iy - y0)[:, None]
    top = (1.0 - fx) * src[y0, x0] + fx * src[y0, x1]
    bottom = (1.0 - fx) * src[y1, x0] + fx * src[y1, x1]
    out = (1.0 - fy) * top + fy * bottom
    out[~inside] = fill
    return out.reshape(src.shape)


@overload
def warp_grid(grid: FeatureGrid, h: Homography, stride: float = ..., fill: Optional[float] = ...) -> FeatureGrid:
    ...


@overload
def warp_grid(grid: WeightMap, h: Homography, stride: float = ..., fill: Optional[float] = ...) -> WeightMap:
    ...


def warp_grid(grid: G, h: Homography, stride: float = 1.0, fill: Optional[float] = None) -> G:
    """
    Resamples a feature grid or weight map into the frame h maps onto. Fill defaults
    to 1 (background weight) for weight maps and 0 for feature grids. Feature values
    are resampled as constants.
    """
    h_cells = cell_homography(h, stride)
    if isinstance(grid, WeightMap):
        src = grid.as_grid()[:, :, None]
        out = warp_array(src, h_cells, 1.0 if fill is None else fill)
        return WeightMap(grid.h, grid.w, out.reshape(-1))
    src = grid.numpy()
    out = warp_array(src, h_cells, 0.0 if fill is None else fill)
    return FeatureGrid(grid.h, grid.w, Matrix(out.reshape(grid.hw, grid.c)))
