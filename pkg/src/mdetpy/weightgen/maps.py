from __future__ import annotations

from typing import Final, Optional, Sequence, Tuple

import numpy as np

from ..elements import BBox
from ..elements import Component
from ..elements import SegMask
from ..elements import Setting
from ..elements import WeightMap
from ..exceptions import MissingInputException
from ..geometry import Homography
from ..geometry import cell_centers
from ..geometry import cell_homography
from ..geometry.warping import warp_array
from ..numerics import FloatArray

MASK_THRESHOLD: Final = 0.5
ALPHA_WAM: Final = 1.0
ALPHA_WSAM: Final = 1.0
BETA: Final = 1.0


def _vet_emphasis(alpha: float) -> None:
    if alpha < 0.0:
        raise ValueError(f"emphasis must be >= 0, got {alpha}")


def rasterize_boxes(boxes: Sequence[BBox], h: int, w: int, stride: float = 1.0) -> FloatArray:
    """hw indicator of cells whose centers lie strictly inside at least one box"""
    centers = cell_centers(h, w, stride)
    hit = np.zeros(h * w, dtype=bool)
    for b in boxes:
        hit |= (centers[:, 0] > b.x1) & (centers[:, 0] < b.x2) & (centers[:, 1] > b.y1) & (centers[:, 1] < b.y2)
    return hit.astype(np.float64)


def map_from_boxes(
    boxes: Sequence[BBox],
    h: int,
    w: int,
    stride: float = 1.0,
    emphasis: float = ALPHA_WAM,
) -> WeightMap:
    _vet_emphasis(emphasis)
    return WeightMap(h, w, 1.0 + emphasis * rasterize_boxes(boxes, h, w, stride))


def map_from_mask(mask: SegMask, threshold: float = MASK_THRESHOLD, emphasis: float = ALPHA_WAM) -> WeightMap:
    """Cells with probability strictly above threshold become foreground"""
    _vet_emphasis(emphasis)
    fg = mask.probs.data[:, 0] > threshold
    return WeightMap(mask.h, mask.w, np.where(fg, 1.0 + emphasis, 1.0))


def _require(setting: Setting, value: Optional[object], what: str) -> None:
    if value is None:
        raise MissingInputException(Component.WeightGen, setting, what)


def generate_wam_maps(
    setting: Setting | str,
    h: int,
    w: int,
    gt_boxes_r: Optional[Sequence[BBox]] = None,
    pred_boxes_r: Optional[Sequence[BBox]] = None,
    mask_t: Optional[SegMask] = None,
    mask_r: Optional[SegMask] = None,
    alpha: float = ALPHA_WAM,
    stride: float = 1.0,
) -> Tuple[WeightMap, WeightMap]:
    """
    (M_t, M_r) for the matcher branch. The target map always comes from the decoder
    mask; the reference map from GT boxes (GTBoxR), predicted boxes (PreBoxR) or the
    decoder mask (NoBoxR).
    """
    setting = Setting.parse(setting)
    _require(setting, mask_t, "a target decoder mask")
    assert mask_t is not None
    m_t = map_from_mask(mask_t, emphasis=alpha)
    if setting == Setting.GTBoxR:
        _require(setting, gt_boxes_r, "ground-truth reference boxes")
        assert gt_boxes_r is not None
        m_r = map_from_boxes(gt_boxes_r, h, w, stride, alpha)
    elif setting == Setting.PreBoxR:
        _require(setting, pred_boxes_r, "predicted reference boxes")
        assert pred_boxes_r is not None
        m_r = map_from_boxes(pred_boxes_r, h, w, stride, alpha)
    else:
        _require(setting, mask_r, "a reference decoder mask")
        assert mask_r is not None
        m_r = map_from_mask(mask_r, emphasis=alpha)
    return m_t, m_r


def generate_wsam_maps(
    setting: Setting | str,
    h: int,
    w: int,
    h_prime: Homography,
    boxes_r: Optional[Sequence[BBox]] = None,
    mask_t: Optional[SegMask] = None,
    mask_r: Optional[SegMask] = None,
    alpha: float = ALPHA_WSAM,
    stride: float = 1.0,
) -> Tuple[WeightMap, WeightMap]:
    """
    (M_t, M_r) for the detector branch. With reference boxes the target map is the
    reference map carried over by h_prime. Without them both maps come from the
    decoder masks and each is refined by adding the other's warped map; both updates
    read the unrefined maps, and warped contributions are 0 outside the source.
    """
    setting = Setting.parse(setting)
    h_cells = cell_homography(h_prime, stride)
    if setting.uses_reference_boxes:
        _require(setting, boxes_r, "reference boxes")
        assert boxes_r is not None
        m_r = map_from_boxes(boxes_r, h, w, stride, alpha)
        m_t = WeightMap(h, w, warp_array(m_r.as_grid()[:, :, None], h_cells, 1.0).reshape(-1))
        return m_t, m_r

    _require(setting, mask_t, "a target decoder mask")
    _require(setting, mask_r, "a reference decoder mask")
    assert mask_t is not None and mask_r is not None
    r0 = map_from_mask(mask_r, emphasis=alpha).as_grid()[:, :, None]
    t0 = map_from_mask(mask_t, emphasis=alpha).as_grid()[:, :, None]
    r1 = r0 + warp_array(t0, h_cells.inverse(), 0.0)
    t1 = t0 + warp_array(r0, h_cells, 0.0)
    return WeightMap(h, w, t1.reshape(-1)), WeightMap(h, w, r1.reshape(-1))


def box_filter_maps(
    pred_boxes_t: Sequence[BBox],
    wsam_m_r: WeightMap,
    beta: float = BETA,
    stride: float = 1.0,
) -> Tuple[WeightMap, WeightMap]:
    """(M^_t, M^_r): predicted target boxes rasterized at 1 + beta; the reference foreground re-assigned 1 + beta"""
    _vet_emphasis(beta)
    m_hat_t = map_from_boxes(pred_boxes_t, wsam_m_r.h, wsam_m_r.w, stride, beta)
    m_hat_r = WeightMap(wsam_m_r.h, wsam_m_r.w, np.where(wsam_m_r.values > 1.0, 1.0 + beta, 1.0))
    return m_hat_t, m_hat_r
