from __future__ import annotations

from typing import Final, Mapping, Sequence

import numpy as np

from ..elements import BBox
from ..elements import FeatureGrid
from ..elements import SegMask
from ..numerics import Matrix
from ..numerics import Parameters
from ..numerics import ops
from .maps import rasterize_boxes

DECODER_PREFIX: Final = "decoder"
DICE_EPS: Final = 1e-6


def init_decoder_params(params: Parameters, c: int, rng: np.random.Generator, prefix: str = DECODER_PREFIX) -> None:
    scale = 1.0 / np.sqrt(c)
    params.add(f"{prefix}.w1", scale * rng.standard_normal((c, c)))
    params.add(f"{prefix}.b1", np.zeros((1, c)))
    params.add(f"{prefix}.w2", scale * rng.standard_normal((c, 1)))
    params.add(f"{prefix}.b2", np.zeros((1, 1)))


def light_decoder(features: FeatureGrid, bound: Mapping[str, Matrix], prefix: str = DECODER_PREFIX) -> SegMask:
    """Per-cell foreground probability: logistic(ReLU(X W1 + b1) W2 + b2)"""
    hidden = ops.relu(ops.add(ops.matmul(features.values, bound[f"{prefix}.w1"]), bound[f"{prefix}.b1"]))
    logits = ops.add(ops.matmul(hidden, bound[f"{prefix}.w2"]), bound[f"{prefix}.b2"])
    return SegMask(features.h, features.w, ops.logistic(logits))


def dice_distance(p: Matrix, q: Matrix, eps: float = DICE_EPS) -> Matrix:
    """1 - (2 sum(pq) + eps) / (sum(p^2) + sum(q^2) + eps)"""
    num = ops.add(ops.scale(ops.sum_all(ops.multiply(p, q)), 2.0), Matrix(eps))
    den = ops.add(ops.add(ops.sum_all(ops.multiply(p, p)), ops.sum_all(ops.multiply(q, q))), Matrix(eps))
    return ops.subtract(Matrix.ones(1, 1), ops.multiply(num, ops.reciprocal(den)))


def box_projection_loss(mask: SegMask, boxes: Sequence[BBox], stride: float = 1.0) -> Matrix:
    """
    Dice distance between the mask's max-projections onto the x and y axes and those of
    the union-of-boxes indicator. Without boxes the loss is the mean probability.
    """
    if not boxes:
        return ops.mean_all(mask.probs)
    grid = ops.reshape(mask.probs, mask.h, mask.w)
    target = Matrix(rasterize_boxes(boxes, mask.h, mask.w, stride).reshape(mask.h, mask.w))
    loss_x = dice_distance(ops.max_along(grid, 0), ops.max_along(target, 0))
    loss_y = dice_distance(ops.max_along(grid, 1), ops.max_along(target, 1))
    return ops.add(loss_x, loss_y)
