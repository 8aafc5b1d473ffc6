from __future__ import annotations

from .head import DetPredictions as DetPredictions
from .head import init_det_params as init_det_params
from .head import det_head as det_head
from .targets import DenseTargets as DenseTargets
from .targets import assign_targets as assign_targets
from .loss import detection_loss as detection_loss
from .decode import decode_detections as decode_detections
from .decode import nms as nms
from .metrics import COCO_IOU_THRESHOLDS as COCO_IOU_THRESHOLDS
from .metrics import APResult as APResult
from .metrics import AveragePrecisionEvaluator as AveragePrecisionEvaluator
from .metrics import average_precision as average_precision
from .metrics import iou as iou
