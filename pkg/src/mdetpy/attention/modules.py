from __future__ import annotations

from typing import Final, Mapping, Tuple

import numpy as np

from ..elements import AttentionMode
from ..elements import Component
from ..elements import FeatureGrid
from ..elements import WeightMap
from ..exceptions import UnsupportedException
from ..numerics import Matrix
from ..numerics import Parameters
from .blocks import BlockParams, init_block_params, transformer_block

N_WAM: Final = 2
N_WSAM: Final = 1
WAM_PREFIX: Final = "wam"
WSAM_PREFIX: Final = "wsam"

Maps = Tuple[WeightMap, WeightMap]


def _vet(n: int, mode: AttentionMode | str, what: str) -> AttentionMode:
    if n < 1:
        raise ValueError(f"{what} needs at least one round, got {n}")
    mode = AttentionMode.parse(mode)
    if mode == AttentionMode.Self:
        raise UnsupportedException(Component.Attention, mode, f"{what} attends across images; self mode is not allowed")
    return mode


def init_wam_params(
    params: Parameters,
    c: int,
    rng: np.random.Generator,
    n_wam: int = N_WAM,
    prefix: str = WAM_PREFIX,
) -> None:
    """Independent blocks for each round and each direction (target-from-reference, reference-from-target)"""
    for r in range(n_wam):
        for side in ("t", "r"):
            init_block_params(params, f"{prefix}.{r}.{side}.attn", c, rng)
            init_block_params(params, f"{prefix}.{r}.{side}.self", c, rng)


def init_wsam_params(
    params: Parameters,
    c: int,
    num_classes: int,
    rng: np.random.Generator,
    n_wsam: int = N_WSAM,
    prefix: str = WSAM_PREFIX,
) -> None:
    for r in range(n_wsam):
        init_block_params(params, f"{prefix}.{r}.attn", c, rng, num_classes=num_classes)
        init_block_params(params, f"{prefix}.{r}.self", c, rng)


def _round(
    x: FeatureGrid,
    other: FeatureGrid,
    maps: Maps,
    bound: Mapping[str, Matrix],
    prefix: str,
    mode: AttentionMode,
) -> FeatureGrid:
    y = transformer_block(x, BlockParams.from_bound(bound, f"{prefix}.attn"), mode, context=other, maps=maps)
    return transformer_block(y, BlockParams.from_bound(bound, f"{prefix}.self"), AttentionMode.Self)


def wam_forward(
    c_t: FeatureGrid,
    c_r: FeatureGrid,
    maps: Maps,
    bound: Mapping[str, Matrix],
    n_wam: int = N_WAM,
    mode: AttentionMode | str = AttentionMode.Weighted,
    prefix: str = WAM_PREFIX,
) -> Tuple[FeatureGrid, FeatureGrid]:
    """
    Symmetric matcher-branch enhancement. Each round updates both grids from the
    previous round's values: the target attends to the reference with (M_t, M_r),
    the reference to the target with (M_r, M_t), each followed by self-attention.
    """
    mode = _vet(n_wam, mode, "WAM")
    m_t, m_r = maps
    for r in range(n_wam):
        t_next = _round(c_t, c_r, (m_t, m_r), bound, f"{prefix}.{r}.t", mode)
        r_next = _round(c_r, c_t, (m_r, m_t), bound, f"{prefix}.{r}.r", mode)
        c_t, c_r = t_next, r_next
    return c_t, c_r


def wsam_forward(
    c_t: FeatureGrid,
    c_r: FeatureGrid,
    maps: Maps,
    bound: Mapping[str, Matrix],
    n_wsam: int = N_WSAM,
    mode: AttentionMode | str = AttentionMode.WeightedSpatial,
    prefix: str = WSAM_PREFIX,
) -> FeatureGrid:
    """Detector-branch enhancement of the target grid; the reference grid is context only"""
    mode = _vet(n_wsam, mode, "WSAM")
    for r in range(n_wsam):
        c_t = _round(c_t, c_r, maps, bound, f"{prefix}.{r}", mode)
    return c_t
