from __future__ import annotations

from typing import Final

import attrs

from ..elements import Component
from ..elements import FeatureGrid
from ..elements import WeightMap
from ..exceptions import ShapeMismatchException
from ..numerics import Matrix
from ..numerics import ops

TAU: Final = 0.1


@attrs.frozen
class ScoreMatrix:
    """S = cos(C_t, C_r) / tau, hw_t x hw_r"""

    s: Matrix
    tau: float = attrs.field(converter=float)

    @tau.validator
    def _vet_tau(self, _: attrs.Attribute, value: float) -> None:
        if value <= 0.0:
            raise ValueError(f"temperature must be > 0, got {value}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.s.shape


def score_matrix(c_t_bar: FeatureGrid, c_r_bar: FeatureGrid, tau: float = TAU) -> ScoreMatrix:
    if tau <= 0.0:
        raise ValueError(f"temperature must be > 0, got {tau}")
    if c_t_bar.c != c_r_bar.c:
        raise ShapeMismatchException(Component.MatchHead, "score_matrix", c_t_bar.shape, c_r_bar.shape)
    t = ops.normalize_rows(c_t_bar.values)
    r = ops.normalize_rows(c_r_bar.values)
    return ScoreMatrix(ops.scale(ops.matmul(t, ops.transpose(r)), 1.0 / tau), tau)


def dual_softmax(s: ScoreMatrix | Matrix) -> Matrix:
    """P = softmax over each row of S times softmax over each column of S, entrywise"""
    m = s.s if isinstance(s, ScoreMatrix) else s
    return ops.multiply(ops.softmax_rows(m), ops.softmax_cols(m))


def apply_box_filter(p: Matrix, m_hat_t: WeightMap, m_hat_r: WeightMap) -> Matrix:
    """P * F with F(i, j) = M^_t(i) M^_r(j)"""
    if p.rows != len(m_hat_t) or p.cols != len(m_hat_r):
        raise ShapeMismatchException(Component.MatchHead, "apply_box_filter", p.shape, (len(m_hat_t), len(m_hat_r)))
    return ops.multiply(ops.multiply(p, m_hat_t.as_column()), Matrix.row(m_hat_r.values))
