from __future__ import annotations

from typing import Final, Mapping

import attrs
import numpy as np

from ..elements import Component
from ..elements import FeatureGrid
from ..exceptions import ShapeMismatchException
from ..numerics import Matrix
from ..numerics import Parameters
from ..numerics import ops

DET_PREFIX: Final = "det"
NUM_SIDES: Final = 4


@attrs.frozen
class DetPredictions:
    """
    Dense per-cell head outputs: class logits (hw x C), objectness logits (hw x 1) and
    log box offsets (hw x 4, order l, t, r, b, in units of stride)
    """

    h: int
    w: int
    stride: float
    cls_logits: Matrix
    obj_logits: Matrix
    reg_logits: Matrix

    def __attrs_post_init__(self) -> None:
        hw = self.h * self.w
        if (
            self.cls_logits.rows != hw
            or self.obj_logits.shape != (hw, 1)
            or self.reg_logits.shape != (hw, NUM_SIDES)
        ):
            raise ShapeMismatchException(
                Component.MiniDet,
                "DetPredictions",
                self.cls_logits.shape,
                self.obj_logits.shape,
                self.reg_logits.shape,
            )

    @property
    def hw(self) -> int:
        return self.h * self.w

    @property
    def num_classes(self) -> int:
        return self.cls_logits.cols

    def objectness(self) -> Matrix:
        return ops.logistic(self.obj_logits)

    def class_probs(self) -> Matrix:
        return ops.softmax_rows(self.cls_logits)

    def offsets(self) -> Matrix:
        """Positive l, t, r, b distances in cells"""
        return ops.exp(self.reg_logits)

    def detach(self) -> DetPredictions:
        return DetPredictions(
            self.h,
            self.w,
            self.stride,
            self.cls_logits.detach(),
            self.obj_logits.detach(),
            self.reg_logits.detach(),
        )


def init_det_params(
    params: Parameters,
    c: int,
    num_classes: int,
    rng: np.random.Generator,
    prefix: str = DET_PREFIX,
) -> None:
    scale = 1.0 / np.sqrt(c)
    params.add(f"{prefix}.cls_w", scale * rng.standard_normal((c, num_classes)))
    params.add(f"{prefix}.cls_b", np.zeros((1, num_classes)))
    params.add(f"{prefix}.obj_w", scale * rng.standard_normal((c, 1)))
    params.add(f"{prefix}.obj_b", np.zeros((1, 1)))
    params.add(f"{prefix}.reg_w", scale * rng.standard_normal((c, NUM_SIDES)))
    params.add(f"{prefix}.reg_b", np.zeros((1, NUM_SIDES)))


def det_head(
    features: FeatureGrid,
    bound: Mapping[str, Matrix],
    stride: float = 1.0,
    prefix: str = DET_PREFIX,
) -> DetPredictions:
    """Per-cell affine class, objectness and box branches"""

    def affine(name: str) -> Matrix:
        return ops.add(ops.matmul(features.values, bound[f"{prefix}.{name}_w"]), bound[f"{prefix}.{name}_b"])

    return DetPredictions(features.h, features.w, stride, affine("cls"), affine("obj"), affine("reg"))
