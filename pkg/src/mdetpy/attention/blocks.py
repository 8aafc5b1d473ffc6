from __future__ import annotations

from typing import Final, Mapping, Optional, Tuple

import attrs
import numpy as np

from ..elements import AttentionMode
from ..elements import Component
from ..elements import FeatureGrid
from ..elements import WeightMap
from ..exceptions import ShapeMismatchException
from ..numerics import Matrix
from ..numerics import Parameters
from ..numerics import ops
from .weighted import cross_attention
from .weighted import weighted_attention_matrix
from .weighted import ws_attention_matrix

FFN_EXPANSION: Final = 4
INIT_SCALE: Final = 0.1

_PROJECTIONS: Final = ("wq", "wk", "wv")
_MATRIX_NAMES: Final = ("wq", "wk", "wv", "wo", "w1", "b1", "w2", "b2", "ln1_g", "ln1_b", "ln2_g", "ln2_b")


@attrs.frozen
class BlockParams:
    """Matrices of one pre-normalization residual attention block, optionally with W_e"""

    wq: Matrix
    wk: Matrix
    wv: Matrix
    wo: Matrix
    w1: Matrix
    b1: Matrix
    w2: Matrix
    b2: Matrix
    ln1_g: Matrix
    ln1_b: Matrix
    ln2_g: Matrix
    ln2_b: Matrix
    w_e: Optional[Matrix] = None

    def __attrs_post_init__(self) -> None:
        c = self.wq.rows
        expected = {
            "wq": (c, c),
            "wk": (c, c),
            "wv": (c, c),
            "wo": (c, c),
            "w1": (c, FFN_EXPANSION * c),
            "b1": (1, FFN_EXPANSION * c),
            "w2": (FFN_EXPANSION * c, c),
            "b2": (1, c),
            "ln1_g": (1, c),
            "ln1_b": (1, c),
            "ln2_g": (1, c),
            "ln2_b": (1, c),
        }
        for name, shape in expected.items():
            m: Matrix = getattr(self, name)
            if m.shape != shape:
                raise ShapeMismatchException(Component.Attention, f"BlockParams.{name}", m.shape, shape)
        if self.w_e is not None and self.w_e.cols != c:
            raise ShapeMismatchException(Component.Attention, "BlockParams.w_e", self.w_e.shape, (-1, c))

    @property
    def channels(self) -> int:
        return self.wq.rows

    @classmethod
    def from_bound(cls, bound: Mapping[str, Matrix], prefix: str) -> BlockParams:
        """Collects prefix.wq, prefix.wk, ... (and prefix.w_e when present) from bound parameters"""
        kw = {n: bound[f"{prefix}.{n}"] for n in _MATRIX_NAMES}
        return cls(**kw, w_e=bound.get(f"{prefix}.w_e"))


def _orthogonal(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q = q * np.sign(np.diag(r))
    return q if rows >= cols else q.T


def init_block_params(
    params: Parameters,
    prefix: str,
    c: int,
    rng: np.random.Generator,
    num_classes: Optional[int] = None,
) -> None:
    """
    Adds one block's arrays under prefix. Projections and the first FFN layer are
    orthogonal-random scaled by INIT_SCALE; the output projection and second FFN layer
    start at zero so a fresh block is the identity.
    """
    ce = FFN_EXPANSION * c
    for name in _PROJECTIONS:
        params.add(f"{prefix}.{name}", INIT_SCALE * _orthogonal(rng, c, c))
    params.add(f"{prefix}.wo", np.zeros((c, c)))
    params.add(f"{prefix}.w1", INIT_SCALE * _orthogonal(rng, c, ce))
    params.add(f"{prefix}.b1", np.zeros((1, ce)))
    params.add(f"{prefix}.w2", np.zeros((ce, c)))
    params.add(f"{prefix}.b2", np.zeros((1, c)))
    params.add(f"{prefix}.ln1_g", np.ones((1, c)))
    params.add(f"{prefix}.ln1_b", np.zeros((1, c)))
    params.add(f"{prefix}.ln2_g", np.ones((1, c)))
    params.add(f"{prefix}.ln2_b", np.zeros((1, c)))
    if num_classes is not None:
        params.add(f"{prefix}.w_e", INIT_SCALE * rng.standard_normal((num_classes, c)))


def _attend(
    mode: AttentionMode,
    q: Matrix,
    k: Matrix,
    v: Matrix,
    maps: Optional[Tuple[Matrix, Matrix]],
    w_e: Optional[Matrix],
) -> Matrix:
    if mode in (AttentionMode.Self, AttentionMode.Cross):
        return cross_attention(q, k, v)
    m_q, m_k = maps if maps is not None else (Matrix.ones(q.rows, 1), Matrix.ones(k.rows, 1))
    if mode == AttentionMode.Weighted:
        return weighted_attention_matrix(q, k, v, m_q, m_k)
    core = ws_attention_matrix(q, k, v, m_q, m_k)
    if w_e is not None:
        # semantic branch: projected queries against raw embeddings, uniform maps
        core = ops.add(core, ws_attention_matrix(q, w_e, w_e, Matrix.ones(q.rows, 1), Matrix.ones(w_e.rows, 1)))
    return core


def transformer_block(
    x: FeatureGrid,
    params: BlockParams,
    mode: AttentionMode | str,
    context: Optional[FeatureGrid] = None,
    maps: Optional[Tuple[WeightMap, WeightMap]] = None,
) -> FeatureGrid:
    """
    y = x + Attn(LN1(x) Wq, LN1(ctx) Wk, LN1(ctx) Wv) Wo
    z = y + ReLU(LN2(y) W1 + b1) W2 + b2
    ctx is x itself in self mode. maps = (M_Q over x, M_K over ctx) drive the weighted
    modes and default to uniform.
    """
    mode = AttentionMode.parse(mode)
    if x.c != params.channels:
        raise ShapeMismatchException(Component.Attention, "transformer_block", x.shape, (params.channels,))
    if mode == AttentionMode.Self:
        context = x
    elif context is None:
        raise ValueError(f"{mode.label} attention needs a context grid")

    xv = x.values
    h = ops.layer_norm(xv, params.ln1_g, params.ln1_b)
    hc = h if context is x else ops.layer_norm(context.values, params.ln1_g, params.ln1_b)
    q = ops.matmul(h, params.wq)
    k = ops.matmul(hc, params.wk)
    v = ops.matmul(hc, params.wv)

    cols: Optional[Tuple[Matrix, Matrix]] = None
    if maps is not None and mode.is_weighted:
        m_q, m_k = maps
        if len(m_q) != x.hw or len(m_k) != context.hw:
            raise ShapeMismatchException(
                Component.Attention, "transformer_block", (x.hw, context.hw), (len(m_q), len(m_k))
            )
        cols = (m_q.as_column(), m_k.as_column())

    y = ops.add(xv, ops.matmul(_attend(mode, q, k, v, cols, params.w_e), params.wo))
    f = ops.relu(ops.add(ops.matmul(ops.layer_norm(y, params.ln2_g, params.ln2_b), params.w1), params.b1))
    z = ops.add(y, ops.add(ops.matmul(f, params.w2), params.b2))
    return x.with_values(z)
