"""
Attention cores over feature matrices. Weight maps enter as hw x 1 columns that
broadcast across channels. There is no 1/sqrt(d) logit scaling anywhere.
"""
from __future__ import annotations

from typing import Optional

from ..elements import Component
from ..elements import FeatureGrid
from ..elements import WeightMap
from ..exceptions import ShapeMismatchException
from ..numerics import Matrix
from ..numerics import ops


def _vet(op: str, q: Matrix, k: Matrix, v: Matrix, m_q: Optional[Matrix], m_k: Optional[Matrix]) -> None:
    if q.cols != k.cols or k.rows != v.rows:
        raise ShapeMismatchException(Component.Attention, op, q.shape, k.shape, v.shape)
    if m_q is not None and m_q.shape != (q.rows, 1):
        raise ShapeMismatchException(Component.Attention, op, q.shape, m_q.shape)
    if m_k is not None and m_k.shape != (k.rows, 1):
        raise ShapeMismatchException(Component.Attention, op, k.shape, m_k.shape)


def attention_weights(q: Matrix, k: Matrix, m_q: Optional[Matrix] = None, m_k: Optional[Matrix] = None) -> Matrix:
    """softmax_rows((Q * M_Q)(K * M_K)^T); plain cross-attention weights when the maps are absent"""
    _vet("attention_weights", q, k, k, m_q, m_k)
    qw = q if m_q is None else ops.multiply(q, m_q)
    kw = k if m_k is None else ops.multiply(k, m_k)
    return ops.softmax_rows(ops.matmul(qw, ops.transpose(kw)))


def cross_attention(q: Matrix, k: Matrix, v: Matrix) -> Matrix:
    _vet("cross_attention", q, k, v, None, None)
    return ops.matmul(attention_weights(q, k), v)


def weighted_attention_matrix(q: Matrix, k: Matrix, v: Matrix, m_q: Matrix, m_k: Matrix) -> Matrix:
    _vet("weighted_attention", q, k, v, m_q, m_k)
    return ops.matmul(attention_weights(q, k, m_q, m_k), v)


def ws_attention_matrix(q: Matrix, k: Matrix, v: Matrix, m_q: Matrix, m_k: Matrix) -> Matrix:
    """Q' = Q * (1 + cos(Q, V~Q)) where V~Q is the weighted attention of Q over (K, V)"""
    if v.cols != q.cols:
        raise ShapeMismatchException(Component.Attention, "ws_attention", q.shape, v.shape)
    v_q = weighted_attention_matrix(q, k, v, m_q, m_k)
    m_qv = ops.cosine_rows(q, v_q)
    return ops.multiply(q, ops.add(m_qv, Matrix.ones(q.rows, 1)))


def ws_attention_combined_matrix(
    q: Matrix,
    k: Matrix,
    v: Matrix,
    w_e: Matrix,
    m_q: Matrix,
    m_k: Matrix,
) -> Matrix:
    """Spatial branch over (K, V) plus the semantic-embedding branch over W_e with uniform maps"""
    if w_e.cols != q.cols:
        raise ShapeMismatchException(Component.Attention, "ws_attention_combined", q.shape, w_e.shape)
    spatial = ws_attention_matrix(q, k, v, m_q, m_k)
    semantic = ws_attention_matrix(q, w_e, w_e, Matrix.ones(q.rows, 1), Matrix.ones(w_e.rows, 1))
    return ops.add(spatial, semantic)


# FeatureGrid / WeightMap surface
def _map_column(m: WeightMap, grid: FeatureGrid, op: str) -> Matrix:
    if len(m) != grid.hw:
        raise ShapeMismatchException(Component.Attention, op, (grid.hw,), (len(m),))
    return m.as_column()


def weighted_attention(q: FeatureGrid, k: FeatureGrid, v: FeatureGrid, m_q: WeightMap, m_k: WeightMap) -> FeatureGrid:
    out = weighted_attention_matrix(
        q.values,
        k.values,
        v.values,
        _map_column(m_q, q, "weighted_attention"),
        _map_column(m_k, k, "weighted_attention"),
    )
    return q.with_values(out)


def ws_attention(q: FeatureGrid, k: FeatureGrid, v: FeatureGrid, m_q: WeightMap, m_k: WeightMap) -> FeatureGrid:
    out = ws_attention_matrix(
        q.values,
        k.values,
        v.values,
        _map_column(m_q, q, "ws_attention"),
        _map_column(m_k, k, "ws_attention"),
    )
    return q.with_values(out)


def ws_attention_combined(
    c_t: FeatureGrid,
    c_r: FeatureGrid,
    w_e: Matrix,
    m_t: WeightMap,
    m_r: WeightMap,
) -> FeatureGrid:
    out = ws_attention_combined_matrix(
        c_t.values,
        c_r.values,
        c_r.values,
        w_e,
        _map_column(m_t, c_t, "ws_attention_combined"),
        _map_column(m_r, c_r, "ws_attention_combined"),
    )
    return c_t.with_values(out)
