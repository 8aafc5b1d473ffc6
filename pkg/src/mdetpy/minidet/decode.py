from __future__ import annotations

from typing import Dict, Final, List, Sequence

import numpy as np
from loguru import logger

from ..elements import BBox
from ..elements import Detection
from ..geometry import cell_centers
from .head import DetPredictions
from .metrics import iou

SCORE_THRESH: Final = 0.05
NMS_IOU: Final = 0.6
MAX_DETECTIONS: Final = 100
MAX_LOG_OFFSET: Final = 30.0


def nms(dets: Sequence[Detection], nms_iou: float = NMS_IOU) -> List[Detection]:
    """Greedy class-wise suppression; the input is taken in descending-score order"""
    kept: Dict[int, List[Detection]] = {}
    out: List[Detection] = []
    for d in dets:
        same = kept.setdefault(d.class_id, [])
        if all(iou(d.box, k.box) < nms_iou for k in same):
            same.append(d)
            out.append(d)
    return out


def decode_detections(
    preds: DetPredictions,
    score_thresh: float = SCORE_THRESH,
    nms_iou: float = NMS_IOU,
    max_detections: int = MAX_DETECTIONS,
) -> List[Detection]:
    """
    One candidate per cell: its box spans center - (l, t) to center + (r, b), its score
    is objectness times the top class probability. Candidates below score_thresh are
    dropped, the rest clipped to the image and suppressed class by class.
    """
    if not (0.0 <= score_thresh <= 1.0 and 0.0 <= nms_iou <= 1.0):
        raise ValueError("score_thresh and nms_iou must lie in [0, 1]")
    obj = preds.objectness().data[:, 0]
    probs = preds.class_probs().data
    cls = probs.argmax(axis=1)
    scores = obj * probs[np.arange(preds.hw), cls]
    offsets = np.exp(np.clip(preds.reg_logits.data, -MAX_LOG_OFFSET, MAX_LOG_OFFSET)) * preds.stride
    centers = cell_centers(preds.h, preds.w, preds.stride)
    width, height = preds.w * preds.stride, preds.h * preds.stride

    order = sorted(np.flatnonzero(scores >= score_thresh).tolist(), key=lambda i: (-scores[i], i))
    candidates: List[Detection] = []
    for i in order:
        cx, cy = centers[i]
        left, top, right, bottom = offsets[i]
        box = BBox(cx - left, cy - top, cx + right, cy + bottom, int(cls[i]) + 1).clamped(width, height)
        if box is not None:
            candidates.append(Detection(box, min(1.0, float(scores[i]))))
    out = nms(candidates, nms_iou)[:max_detections]
    logger.debug("decode: {n} candidates, {k} after NMS", n=len(candidates), k=len(out))
    return out
