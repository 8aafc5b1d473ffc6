from __future__ import annotations

from typing import Final, Mapping

import numpy as np

from ..attention import init_wam_params
from ..attention import init_wsam_params
from ..config import ExperimentConfig
from ..elements import FeatureGrid
from ..minidet import init_det_params
from ..numerics import Matrix
from ..numerics import Parameters
from ..numerics import ops
from ..utils import rng_for
from ..weightgen import init_decoder_params

BACKBONE_PREFIX: Final = "backbone"

# seed stream of the initial weights
MODEL_STREAM: Final = 101


def init_model_params(config: ExperimentConfig) -> Parameters:
    """
    Every weight the configured variant trains: the per-cell linear backbone and the
    detector head always, the light decoder and WAM blocks when the variant runs WAM
    or WSAM, the WSAM blocks when it runs WSAM
    """
    rng = rng_for(config.seed, MODEL_STREAM)
    c_in, c = config.scene.c, config.channels
    num_classes = config.scene.num_classes
    variant = config.variant

    params = Parameters()
    params.add(f"{BACKBONE_PREFIX}.w", rng.standard_normal((c_in, c)) / np.sqrt(c_in))
    params.add(f"{BACKBONE_PREFIX}.b", np.zeros((1, c)))
    init_det_params(params, c, num_classes, rng)
    if not variant.is_baseline:
        init_decoder_params(params, c, rng)
    if variant.use_wam:
        init_wam_params(params, c, rng, config.n_wam)
    if variant.use_wsam:
        init_wsam_params(params, c, num_classes, rng, config.n_wsam)
    return params


def backbone(grid: FeatureGrid, bound: Mapping[str, Matrix], prefix: str = BACKBONE_PREFIX) -> FeatureGrid:
    out = ops.add(ops.matmul(grid.values, bound[f"{prefix}.w"]), bound[f"{prefix}.b"])
    return grid.with_values(out)
