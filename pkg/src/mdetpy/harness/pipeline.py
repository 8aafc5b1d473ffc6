from __future__ import annotations

from typing import Dict, Final, List, Mapping, Optional, Sequence, Tuple

import attrs
from loguru import logger

from ..attention import wam_forward
from ..attention import wsam_forward
from ..config import ExperimentConfig
from ..elements import BBox
from ..elements import Detection
from ..elements import FeatureGrid
from ..elements import SegMask
from ..elements import Setting
from ..elements import WeightMap
from ..exceptions import DegenerateGeometryException
from ..exceptions import EstimationFailureException
from ..geometry import Correspondence
from ..geometry import Homography
from ..geometry import cell_centers
from ..geometry import ransac_homography
from ..matchhead import MatchSet
from ..matchhead import apply_box_filter
from ..matchhead import dual_softmax
from ..matchhead import matcher_loss
from ..matchhead import mnn_select
from ..matchhead import score_matrix
from ..minidet import DetPredictions
from ..minidet import assign_targets
from ..minidet import decode_detections
from ..minidet import det_head
from ..minidet import detection_loss
from ..numerics import Matrix
from ..numerics import ops
from ..synthdata import SceneSample
from ..utils import derive_seed
from ..weightgen import box_filter_maps
from ..weightgen import box_projection_loss
from ..weightgen import generate_wam_maps
from ..weightgen import generate_wsam_maps
from ..weightgen import light_decoder
from .params import backbone

# seed streams for the per-sample RANSAC runs
INTERIM_STREAM: Final = 201
FINAL_STREAM: Final = 202

LOSS_KEYS: Final = ("total", "matcher", "detector", "decoder")


@attrs.frozen(eq=False)
class PipelineOutput:
    """
    What one forward pass produces for a sample: the final match probabilities and
    their MNN matches, the estimated homography (None when RANSAC failed or was skipped), decoded
    target detections and the loss terms
    """

    p: Matrix
    matches: MatchSet
    h_est: Optional[Homography]
    predictions: DetPredictions
    detections: Tuple[Detection, ...]
    losses: Dict[str, Matrix]
    h_interim: Optional[Homography] = None
    mask_t: Optional[SegMask] = None
    mask_r: Optional[SegMask] = None

    def loss_values(self) -> Dict[str, float]:
        return {k: v.item() for k, v in self.losses.items()}


def match_correspondences(matches: MatchSet, h: int, w: int, stride: float = 1.0) -> List[Correspondence]:
    """Cell-center point pairs of the selected (target, reference) matches"""
    centers = cell_centers(h, w, stride)
    return [Correspondence(centers[m.i], centers[m.j], m.p) for m in matches]


def estimate_homography(
    matches: MatchSet,
    h: int,
    w: int,
    config: ExperimentConfig,
    seed: int,
) -> Optional[Homography]:
    try:
        h_est, inliers = ransac_homography(
            match_correspondences(matches, h, w),
            iters=config.ransac_iters,
            inlier_px=config.ransac_inlier_px,
            seed=seed,
        )
    except (EstimationFailureException, DegenerateGeometryException) as e:
        logger.debug("RANSAC failed on {n} matches: {e}", n=len(matches), e=e)
        return None
    logger.debug("RANSAC kept {k} of {n} matches", k=len(inliers), n=len(matches))
    return h_est


def _final_homography(matches: MatchSet, sample: SceneSample, config: ExperimentConfig) -> Optional[Homography]:
    return estimate_homography(
        matches, sample.h, sample.w, config, derive_seed(config.seed, FINAL_STREAM, sample.index)
    )


def _match_probs(c_t: FeatureGrid, c_r: FeatureGrid, config: ExperimentConfig) -> Matrix:
    return dual_softmax(score_matrix(c_t, c_r, config.tau))


def _losses(
    p: Matrix,
    preds: DetPredictions,
    sample: SceneSample,
    config: ExperimentConfig,
    masks: Optional[Tuple[SegMask, SegMask]] = None,
) -> Dict[str, Matrix]:
    matcher = matcher_loss(p, sample.gt_matches)
    detector = detection_loss(preds, assign_targets(sample.boxes_t, sample.h, sample.w))
    total = ops.add(matcher, ops.scale(detector, config.lam))
    losses = {"matcher": matcher, "detector": detector}
    if masks is not None:
        mask_t, mask_r = masks
        decoder = ops.add(box_projection_loss(mask_t, sample.boxes_t), box_projection_loss(mask_r, sample.boxes_r))
        total = ops.add(total, ops.scale(decoder, config.decoder_weight))
        losses["decoder"] = decoder
    else:
        losses["decoder"] = Matrix.zeros(1, 1)
    losses["total"] = total
    return {k: losses[k] for k in LOSS_KEYS}


def _decode(preds: DetPredictions) -> Tuple[Detection, ...]:
    return tuple(decode_detections(preds.detach()))


def forward_mdbase(
    sample: SceneSample,
    bound: Mapping[str, Matrix],
    config: ExperimentConfig,
    estimate: bool = True,
) -> PipelineOutput:
    """
    Shared backbone, a detector head on the target, and dual-softmax matching of the
    raw backbone features followed by MNN selection and RANSAC. Without estimate the
    final RANSAC is skipped and h_est is None; the losses do not depend on it.
    """
    f_t = backbone(sample.tgt_grid, bound)
    f_r = backbone(sample.ref_grid, bound)
    preds = det_head(f_t, bound)
    p = _match_probs(f_t, f_r, config)
    matches = mnn_select(p, config.theta, config.tau)
    h_est = _final_homography(matches, sample, config) if estimate else None
    return PipelineOutput(
        p=p,
        matches=matches,
        h_est=h_est,
        predictions=preds,
        detections=_decode(preds),
        losses=_losses(p, preds, sample, config),
    )


def _reference_boxes(
    setting: Setting,
    sample: SceneSample,
    f_r: FeatureGrid,
    bound: Mapping[str, Matrix],
) -> Tuple[Optional[Sequence[BBox]], Optional[Sequence[BBox]]]:
    """(ground-truth, predicted) reference boxes as far as the setting provides them"""
    if setting == Setting.GTBoxR:
        return sample.boxes_r, None
    if setting == Setting.PreBoxR:
        # preliminary detector pass on the reference stands in for the previous frame
        return None, [d.box for d in _decode(det_head(f_r, bound))]
    return None, None


def forward_matchdet(
    sample: SceneSample,
    bound: Mapping[str, Matrix],
    config: ExperimentConfig,
    setting: Optional[Setting | str] = None,
    estimate: bool = True,
) -> PipelineOutput:
    """
    The four stages: (1) backbone and light decoder masks; (2) WAM maps and blocks,
    dual-softmax and an interim homography from MNN + RANSAC; (3) WSAM maps carried
    by the interim homography, WSAM blocks and the detector head; (4) Box Filter
    emphasis of the match probabilities from the decoded detections, final MNN and
    RANSAC. Modules the variant switches off are skipped, as is the final RANSAC
    without estimate.
    """
    setting = config.setting if setting is None else Setting.parse(setting)
    variant = config.variant
    h, w = sample.h, sample.w

    # (1)
    f_t = backbone(sample.tgt_grid, bound)
    f_r = backbone(sample.ref_grid, bound)
    mask_t = light_decoder(f_t, bound)
    mask_r = light_decoder(f_r, bound)
    gt_boxes_r, pred_boxes_r = _reference_boxes(setting, sample, f_r, bound)

    # (2)
    c_t, c_r = f_t, f_r
    if variant.use_wam:
        wam_maps = generate_wam_maps(setting, h, w, gt_boxes_r, pred_boxes_r, mask_t, mask_r, config.alpha_wam)
        c_t, c_r = wam_forward(c_t, c_r, wam_maps, bound, config.n_wam, config.matcher_attention)
    p = _match_probs(c_t, c_r, config)

    # (3)
    h_interim: Optional[Homography] = None
    wsam_maps: Optional[Tuple[WeightMap, WeightMap]] = None
    d_t = f_t
    if variant.use_wsam or variant.use_box_filter:
        interim = mnn_select(p, config.theta, config.tau)
        h_interim = estimate_homography(interim, h, w, config, derive_seed(config.seed, INTERIM_STREAM, sample.index))
        if h_interim is None:
            logger.warning("sample {index}: interim homography failed, using identity", index=sample.index)
            h_interim = Homography.identity()
        boxes_r = gt_boxes_r if gt_boxes_r is not None else pred_boxes_r
        wsam_maps = generate_wsam_maps(setting, h, w, h_interim, boxes_r, mask_t, mask_r, config.alpha_wsam)
        if variant.use_wsam:
            d_t = wsam_forward(f_t, f_r, wsam_maps, bound, config.n_wsam, config.detector_attention)
    preds = det_head(d_t, bound)
    detections = _decode(preds)

    # (4)
    if variant.use_box_filter:
        assert wsam_maps is not None
        m_hat_t, m_hat_r = box_filter_maps([d.box for d in detections], wsam_maps[1], config.beta)
        p = apply_box_filter(p, m_hat_t, m_hat_r)
    matches = mnn_select(p, config.theta, config.tau)
    h_est = _final_homography(matches, sample, config) if estimate else None

    return PipelineOutput(
        p=p,
        matches=matches,
        h_est=h_est,
        predictions=preds,
        detections=detections,
        losses=_losses(p, preds, sample, config, (mask_t, mask_r)),
        h_interim=h_interim,
        mask_t=mask_t,
        mask_r=mask_r,
    )


def forward(
    sample: SceneSample,
    bound: Mapping[str, Matrix],
    config: ExperimentConfig,
    estimate: bool = True,
) -> PipelineOutput:
    if config.variant.is_baseline:
        return forward_mdbase(sample, bound, config, estimate)
    return forward_matchdet(sample, bound, config, estimate=estimate)
