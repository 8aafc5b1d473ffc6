"""
Identity-projection, normalization-free forms of the two attention modules and the
two-component feature family used to study how they treat foreground and background.
"""
from __future__ import annotations

from typing import Iterable, Tuple

import attrs
import numpy as np
from pyroaring import FrozenBitMap

from ..elements import FeatureGrid
from ..elements import WeightMap
from ..numerics import Matrix
from ..numerics import ops
from ..utils import rng_for
from .weighted import weighted_attention_matrix, ws_attention_matrix


def _unit_interval(_: object, attribute: attrs.Attribute, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{attribute.name} must lie in [0, 1], got {value}")


@attrs.frozen
class TwoComponentSpec:
    """
    Foreground cells of both images hold one unit vector each with cosine v between the
    images; background cells likewise with cosine u, in an orthogonal subspace
    """

    v: float = attrs.field(converter=float, validator=_unit_interval)
    u: float = attrs.field(converter=float, validator=_unit_interval)
    c: int = attrs.field(converter=int)
    h: int = attrs.field(converter=int)
    w: int = attrs.field(converter=int)
    fg_cells: FrozenBitMap = attrs.field(converter=lambda cells: FrozenBitMap(sorted(cells)))

    @c.validator
    def _vet_c(self, _: attrs.Attribute, value: int) -> None:
        if value < 4:
            raise ValueError(f"two-component features need c >= 4, got {value}")

    @fg_cells.validator
    def _vet_cells(self, _: attrs.Attribute, value: FrozenBitMap) -> None:
        if len(value) and value.max() >= self.h * self.w:
            raise ValueError(f"foreground cell {value.max()} outside a {self.h}x{self.w} grid")

    @property
    def hw(self) -> int:
        return self.h * self.w

    @property
    def bg_cells(self) -> FrozenBitMap:
        return FrozenBitMap(range(self.hw)) - self.fg_cells

    def weight_map(self, alpha: float = 1.0) -> WeightMap:
        values = np.ones(self.hw)
        values[list(self.fg_cells)] = 1.0 + alpha
        return WeightMap(self.h, self.w, values)


def construct_two_component_pair(spec: TwoComponentSpec, seed: int = 0) -> Tuple[FeatureGrid, FeatureGrid]:
    """(C_t, C_r) built on a seeded random orthonormal basis e1..e4 of R^c"""
    rng = rng_for(seed)
    q, r = np.linalg.qr(rng.standard_normal((spec.c, 4)))
    e = (q * np.sign(np.diag(r))).T
    f_t = e[0]
    f_r = spec.v * e[0] + np.sqrt(1.0 - spec.v**2) * e[1]
    b_t = e[2]
    b_r = spec.u * e[2] + np.sqrt(1.0 - spec.u**2) * e[3]

    fg = np.zeros(spec.hw, dtype=bool)
    fg[list(spec.fg_cells)] = True
    c_t = np.where(fg[:, None], f_t, b_t)
    c_r = np.where(fg[:, None], f_r, b_r)
    return FeatureGrid(spec.h, spec.w, Matrix(c_t)), FeatureGrid(spec.h, spec.w, Matrix(c_r))


def bare_wam_round(
    c_t: FeatureGrid,
    c_r: FeatureGrid,
    m_t: WeightMap,
    m_r: WeightMap,
) -> Tuple[FeatureGrid, FeatureGrid]:
    """One residual weighted-attention exchange with identity projections, no FFN or normalization"""
    t, r = c_t.values, c_r.values
    mt, mr = m_t.as_column(), m_r.as_column()
    t_next = ops.add(t, weighted_attention_matrix(t, r, r, mt, mr))
    r_next = ops.add(r, weighted_attention_matrix(r, t, t, mr, mt))
    return c_t.with_values(t_next), c_r.with_values(r_next)


def bare_wsam_round(c_t: FeatureGrid, c_r: FeatureGrid, m_t: WeightMap, m_r: WeightMap) -> FeatureGrid:
    """The spatial re-weighting C_t' = C_t * (1 + cos(C_t, V~)) with identity projections"""
    r = c_r.values
    return c_t.with_values(ws_attention_matrix(c_t.values, r, r, m_t.as_column(), m_r.as_column()))


def mean_cosine(a: FeatureGrid, b: FeatureGrid, cells: Iterable[int]) -> float:
    idx = list(cells)
    return float(ops.cosine_rows(a.values, b.values).data[idx, 0].mean())


def mean_norm_ratio(after: FeatureGrid, before: FeatureGrid, cells: Iterable[int]) -> float:
    idx = list(cells)
    num = np.linalg.norm(after.values.data[idx], axis=1)
    den = np.linalg.norm(before.values.data[idx], axis=1)
    return float((num / den).mean())
