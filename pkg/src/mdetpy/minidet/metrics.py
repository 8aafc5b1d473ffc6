from __future__ import annotations

from collections import defaultdict
from typing import Dict, Final, List, Sequence, Tuple

import attrs
import numpy as np

from ..elements import BBox
from ..elements import Detection

COCO_IOU_THRESHOLDS: Final = tuple(round(0.5 + 0.05 * k, 2) for k in range(10))
RECALL_POINTS: Final = np.linspace(0.0, 1.0, 101)


def iou(a: BBox, b: BBox) -> float:
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0.0 or ih <= 0.0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def interpolated_ap(tp: np.ndarray, num_gt: int) -> float:
    """101-point interpolated AP of a score-sorted TP/FP sequence"""
    if num_gt == 0 or len(tp) == 0:
        return 0.0
    acc_tp = np.cumsum(tp)
    acc_fp = np.cumsum(1 - tp)
    recall = acc_tp / num_gt
    precision = acc_tp / (acc_tp + acc_fp)
    # precision envelope, non-increasing in recall
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    at = np.searchsorted(recall, RECALL_POINTS, side="left")
    sampled = np.where(at < len(envelope), envelope[np.minimum(at, len(envelope) - 1)], 0.0)
    return float(sampled.mean())


@attrs.frozen
class APResult:
    per_threshold: Dict[float, float]

    @property
    def ap(self) -> float:
        return float(np.mean(list(self.per_threshold.values()))) if self.per_threshold else 0.0

    @property
    def ap50(self) -> float:
        return self.per_threshold.get(0.5, 0.0)

    @property
    def ap75(self) -> float:
        return self.per_threshold.get(0.75, 0.0)

    def to_dict(self) -> Dict[str, float]:
        return {"AP": self.ap, "AP50": self.ap50, "AP75": self.ap75}


class AveragePrecisionEvaluator:
    """
    Accumulates detections and ground truths image by image and scores the whole split:
    per class, detections are ranked by score and greedily matched to the best unmatched
    ground truth of the same image. Classes without ground truth are skipped.
    """

    __slots__ = ("_iou_thresholds", "_images")

    def __init__(self, iou_thresholds: Sequence[float] = COCO_IOU_THRESHOLDS) -> None:
        self._iou_thresholds = tuple(float(t) for t in iou_thresholds)
        self._images: List[Tuple[Tuple[Detection, ...], Tuple[BBox, ...]]] = []

    def __len__(self) -> int:
        return len(self._images)

    @property
    def iou_thresholds(self) -> Tuple[float, ...]:
        return self._iou_thresholds

    def add(self, dets: Sequence[Detection], gts: Sequence[BBox]) -> None:
        self._images.append((tuple(dets), tuple(gts)))

    def _class_ap(self, cls: int, thr: float, num_gt: int) -> float:
        ranked: List[Tuple[float, int, int, Detection]] = []
        for img, (dets, _) in enumerate(self._images):
            for k, d in enumerate(dets):
                if d.class_id == cls:
                    ranked.append((-d.score, img, k, d))
        ranked.sort(key=lambda r: (r[0], r[1], r[2]))

        used: Dict[int, set[int]] = defaultdict(set)
        tp = np.zeros(len(ranked), dtype=int)
        for n, (_, img, _, d) in enumerate(ranked):
            best, best_iou = -1, -1.0
            for g, gt in enumerate(self._images[img][1]):
                if gt.class_id != cls or g in used[img]:
                    continue
                o = iou(d.box, gt)
                if o >= thr and o > best_iou:
                    best, best_iou = g, o
            if best >= 0:
                used[img].add(best)
                tp[n] = 1
        return interpolated_ap(tp, num_gt)

    def evaluate(self) -> APResult:
        gt_counts: Dict[int, int] = defaultdict(int)
        for _, gts in self._images:
            for g in gts:
                gt_counts[g.class_id] += 1
        classes = sorted(gt_counts)
        per_threshold: Dict[float, float] = {}
        for thr in self._iou_thresholds:
            if not classes:
                per_threshold[thr] = 0.0
                continue
            per_threshold[thr] = float(np.mean([self._class_ap(c, thr, gt_counts[c]) for c in classes]))
        return APResult(per_threshold)


def average_precision(
    dets: Sequence[Detection],
    gts: Sequence[BBox],
    iou_thresholds: Sequence[float] = COCO_IOU_THRESHOLDS,
) -> APResult:
    evaluator = AveragePrecisionEvaluator(iou_thresholds)
    evaluator.add(dets, gts)
    return evaluator.evaluate()
