from __future__ import annotations

from typing import Final

import numpy as np

from ..elements import Component
from ..exceptions import ShapeMismatchException
from ..numerics import Matrix
from ..numerics import ops
from .head import DetPredictions
from .targets import DenseTargets

LOSS_EPS: Final = 1e-12
LAMBDA_REG: Final = 1.0


def _log_eps(m: Matrix) -> Matrix:
    return ops.log(ops.add(m, Matrix(LOSS_EPS)))


def detection_loss(preds: DetPredictions, targets: DenseTargets, lam_reg: float = LAMBDA_REG) -> Matrix:
    """
    Objectness BCE over every cell, plus class cross-entropy and L1 on log box offsets
    over the positive cells
    """
    if (preds.h, preds.w) != (targets.h, targets.w):
        raise ShapeMismatchException(Component.MiniDet, "detection_loss", (preds.h, preds.w), (targets.h, targets.w))
    hw = preds.hw
    y = Matrix(targets.objectness.reshape(-1, 1))
    not_y = Matrix(1.0 - targets.objectness.reshape(-1, 1))
    z = preds.obj_logits
    bce = ops.add(
        ops.multiply(y, _log_eps(ops.logistic(z))),
        ops.multiply(not_y, _log_eps(ops.logistic(ops.scale(z, -1.0)))),
    )
    loss = ops.scale(ops.sum_all(bce), -1.0 / hw)

    pos = targets.positives
    if len(pos) == 0:
        return loss

    one_hot = np.zeros((hw, preds.num_classes))
    one_hot[pos, targets.class_ids[pos] - 1] = 1.0
    log_probs = _log_eps(ops.softmax_rows(preds.cls_logits))
    ce = ops.scale(ops.sum_all(ops.multiply(log_probs, Matrix(one_hot))), -1.0 / len(pos))

    log_target = np.zeros((hw, 4))
    log_target[pos] = np.log(targets.regression[pos] / preds.stride)
    pos_mask = np.zeros((hw, 1))
    pos_mask[pos] = 1.0
    l1 = ops.abs_(ops.subtract(preds.reg_logits, Matrix(log_target)))
    reg = ops.scale(ops.sum_all(ops.multiply(l1, Matrix(pos_mask))), 1.0 / (4 * len(pos)))

    return ops.add(loss, ops.add(ce, ops.scale(reg, lam_reg)))
