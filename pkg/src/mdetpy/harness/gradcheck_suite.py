from __future__ import annotations

from typing import Callable, Dict, Final, List, Mapping, Tuple

import attrs
import numpy as np
from loguru import logger

from ..attention import BlockParams
from ..attention import transformer_block
from ..attention import weighted_attention_matrix
from ..attention import ws_attention_matrix
from ..elements import AttentionMode
from ..elements import BBox
from ..elements import FeatureGrid
from ..elements import WeightMap
from ..matchhead import apply_box_filter
from ..matchhead import dual_softmax
from ..matchhead import matcher_loss
from ..matchhead import score_matrix
from ..minidet import assign_targets
from ..minidet import det_head
from ..minidet import detection_loss
from ..numerics import FloatArray
from ..numerics import Matrix
from ..numerics import check_gradients
from ..numerics import ops
from ..utils import rng_for
from ..utils import timer
from ..weightgen import box_projection_loss
from ..weightgen import light_decoder

GRADCHECK_TOL: Final = 1e-5
INSTANCES: Final = 100

Inputs = Dict[str, FloatArray]
Build = Callable[[Dict[str, Matrix]], Matrix]
Case = Callable[[np.random.Generator, int], Tuple[Build, Inputs]]


def _contract(out: Matrix, weights: FloatArray) -> Matrix:
    """Scalar contraction sum(out * weights) of a matrix-valued op"""
    return ops.sum_all(ops.multiply(out, Matrix(weights)))


def _positive(rng: np.random.Generator, rows: int) -> FloatArray:
    return rng.uniform(1.0, 2.0, size=(rows, 1))


def _weighted_attention(rng: np.random.Generator, _: int) -> Tuple[Build, Inputs]:
    n, m, c = 3, 4, 3
    inputs = {
        "q": rng.standard_normal((n, c)),
        "k": rng.standard_normal((m, c)),
        "v": rng.standard_normal((m, c)),
        "m_q": _positive(rng, n),
        "m_k": _positive(rng, m),
    }
    direction = rng.standard_normal((n, c))

    def build(x: Dict[str, Matrix]) -> Matrix:
        return _contract(weighted_attention_matrix(x["q"], x["k"], x["v"], x["m_q"], x["m_k"]), direction)

    return build, inputs


def _ws_attention(rng: np.random.Generator, _: int) -> Tuple[Build, Inputs]:
    n, m, c = 3, 4, 3
    inputs = {
        "q": rng.standard_normal((n, c)),
        "k": rng.standard_normal((m, c)),
        "v": rng.standard_normal((m, c)),
    }
    m_q, m_k = Matrix(_positive(rng, n)), Matrix(_positive(rng, m))
    direction = rng.standard_normal((n, c))

    def build(x: Dict[str, Matrix]) -> Matrix:
        return _contract(ws_attention_matrix(x["q"], x["k"], x["v"], m_q, m_k), direction)

    return build, inputs


_BLOCK_MODES: Final = (AttentionMode.Self, AttentionMode.Cross, AttentionMode.Weighted, AttentionMode.WeightedSpatial)


def _transformer_block(rng: np.random.Generator, instance: int) -> Tuple[Build, Inputs]:
    h, w, c, hidden = 2, 2, 2, 8
    mode = _BLOCK_MODES[instance % len(_BLOCK_MODES)]
    shapes = {
        "wq": (c, c),
        "wk": (c, c),
        "wv": (c, c),
        "wo": (c, c),
        "w1": (c, hidden),
        "b1": (1, hidden),
        "w2": (hidden, c),
        "b2": (1, c),
        "ln1_g": (1, c),
        "ln1_b": (1, c),
        "ln2_g": (1, c),
        "ln2_b": (1, c),
    }
    fixed = {name: Matrix(rng.standard_normal(shape)) for name, shape in shapes.items()}
    if mode == AttentionMode.WeightedSpatial:
        fixed["w_e"] = Matrix(rng.standard_normal((2, c)))
    checked = ("wq", "wo", "w1", "ln1_g")
    inputs = {"x": rng.standard_normal((h * w, c)), "ctx": rng.standard_normal((h * w, c))}
    inputs.update({name: fixed[name].numpy() for name in checked})
    maps = (WeightMap(h, w, _positive(rng, h * w)[:, 0]), WeightMap(h, w, _positive(rng, h * w)[:, 0]))
    direction = rng.standard_normal((h * w, c))

    def build(x: Dict[str, Matrix]) -> Matrix:
        params = BlockParams(**{**fixed, **{name: x[name] for name in checked}})
        grid = FeatureGrid(h, w, x["x"])
        ctx = FeatureGrid(h, w, x["ctx"])
        if mode == AttentionMode.Self:
            # keeps ctx on the tape so every instance checks the same inputs
            grid = grid.with_values(ops.add(x["x"], ops.scale(x["ctx"], 0.5)))
        out = transformer_block(grid, params, mode, context=ctx, maps=maps)
        return _contract(out.values, direction)

    return build, inputs


def _decoder_projection(rng: np.random.Generator, _: int) -> Tuple[Build, Inputs]:
    h, w, c = 3, 3, 3
    inputs = {
        "x": rng.standard_normal((h * w, c)),
        "decoder.w1": rng.standard_normal((c, c)),
        "decoder.b1": 0.1 * rng.standard_normal((1, c)),
        "decoder.w2": rng.standard_normal((c, 1)),
        "decoder.b2": 0.1 * rng.standard_normal((1, 1)),
    }
    boxes = [BBox(0.0, 0.0, 2.0, 2.0)]

    def build(x: Dict[str, Matrix]) -> Matrix:
        mask = light_decoder(FeatureGrid(h, w, x["x"]), x)
        return box_projection_loss(mask, boxes)

    return build, inputs


def _matcher(rng: np.random.Generator, instance: int) -> Tuple[Build, Inputs]:
    c = 3
    inputs = {"t": rng.standard_normal((4, c)), "r": rng.standard_normal((6, c))}
    gt = [(0, 1), (2, 3), (3, 5)]
    filtered = instance % 2 == 1
    m_t = WeightMap(2, 2, _positive(rng, 4)[:, 0])
    m_r = WeightMap(2, 3, _positive(rng, 6)[:, 0])

    def build(x: Dict[str, Matrix]) -> Matrix:
        p = dual_softmax(score_matrix(FeatureGrid(2, 2, x["t"]), FeatureGrid(2, 3, x["r"]), tau=0.5))
        if filtered:
            p = apply_box_filter(p, m_t, m_r)
        return matcher_loss(p, gt)

    return build, inputs


def _detection(rng: np.random.Generator, _: int) -> Tuple[Build, Inputs]:
    h, w, c, k = 2, 3, 3, 2
    inputs = {
        "x": rng.standard_normal((h * w, c)),
        "det.cls_w": rng.standard_normal((c, k)),
        "det.cls_b": rng.standard_normal((1, k)),
        "det.obj_w": rng.standard_normal((c, 1)),
        "det.obj_b": rng.standard_normal((1, 1)),
        "det.reg_w": rng.standard_normal((c, 4)),
        "det.reg_b": rng.standard_normal((1, 4)),
    }
    targets = assign_targets([BBox(0.0, 0.0, 2.0, 2.0, 1), BBox(2.0, 0.0, 3.0, 2.0, 2)], h, w)

    def build(x: Dict[str, Matrix]) -> Matrix:
        return detection_loss(det_head(FeatureGrid(h, w, x["x"]), x), targets)

    return build, inputs


GRADCHECK_CASES: Final[Mapping[str, Case]] = {
    "weighted_attention": _weighted_attention,
    "ws_attention": _ws_attention,
    "transformer_block": _transformer_block,
    "light_decoder": _decoder_projection,
    "matcher_loss": _matcher,
    "detection_loss": _detection,
}


@attrs.frozen
class GradcheckResult:
    name: str
    instances: int
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst < self.tol


@timer
def run_gradcheck_suite(
    instances: int = INSTANCES,
    seed: int = 0,
    tol: float = GRADCHECK_TOL,
) -> List[GradcheckResult]:
    """Tape gradients against central differences on random instances of every differentiable stage"""
    results = []
    for n, (name, case) in enumerate(GRADCHECK_CASES.items()):
        worst = 0.0
        for i in range(instances):
            build, inputs = case(rng_for(seed, n, i), i)
            worst = max(worst, check_gradients(build, inputs))
        result = GradcheckResult(name, instances, worst, tol)
        log = logger.info if result.passed else logger.error
        log("gradcheck {name}: worst rel. error {worst:.3e} in {n} instances", name=name, worst=worst, n=instances)
        results.append(result)
    return results
