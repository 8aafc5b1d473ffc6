from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Final, Iterator, List, Optional, Sequence, Tuple

import attrs
import numpy as np
from loguru import logger
from ordered_set import OrderedSet
from pyroaring import FrozenBitMap

from ..elements import BBox
from ..elements import FeatureGrid
from ..exceptions import DegenerateGeometryException
from ..geometry import Correspondence
from ..geometry import Homography
from ..geometry import cell_centers
from ..geometry import dlt_from_points
from ..geometry import project
from ..geometry import warp_grid
from ..geometry.metrics import image_corners
from ..numerics import FloatArray
from ..numerics import Matrix
from ..utils import rng_for
from ..utils import timer
from ..weightgen.maps import rasterize_boxes
from .scene import BACKGROUND_STREAM, NOISE_STREAM, PAIR_STREAM, SceneSpec, generate_scene

CORNER_TRIES: Final = 100
MATCH_RADIUS: Final = 0.5


@attrs.frozen(eq=False)
class GroundTruthMatches:
    """
    Derived (target cell, reference cell) pairs in target-cell order, with the exact
    sub-cell point pair behind each: the target cell center and its preimage under h_gt
    """

    pairs: OrderedSet[Tuple[int, int]]
    tgt_points: FloatArray
    ref_points: FloatArray

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.pairs)

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def correspondences(self) -> List[Correspondence]:
        return [Correspondence(t, r) for t, r in zip(self.tgt_points, self.ref_points)]

    def to_list(self) -> List[List[int]]:
        return [[i, j] for i, j in self.pairs]


@attrs.frozen(eq=False)
class SceneSample:
    ref_grid: FeatureGrid
    tgt_grid: FeatureGrid
    h_gt: Homography
    boxes_r: Tuple[BBox, ...]
    boxes_t: Tuple[BBox, ...]
    gt_matches: GroundTruthMatches
    dropped_t: FrozenBitMap = attrs.field(factory=FrozenBitMap)
    index: int = 0
    seed: int = 0

    @property
    def h(self) -> int:
        return self.ref_grid.h

    @property
    def w(self) -> int:
        return self.ref_grid.w


def _is_convex(quad: FloatArray) -> bool:
    edges = np.roll(quad, -1, axis=0) - quad
    nxt = np.roll(edges, -1, axis=0)
    cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
    return bool(np.all(cross > 0.0) or np.all(cross < 0.0))


def random_homography(spec: SceneSpec, index: int = 0) -> Tuple[Homography, FloatArray, FloatArray]:
    """
    Perturbs the four image corners uniformly within +-warp_magnitude * min(h, w) and
    fits the homography taking the original corners onto the perturbed ones.
    Returns (h_gt, corners, perturbed).
    """
    corners = image_corners(spec.w, spec.h)
    if spec.warp_magnitude == 0.0:
        return Homography.identity(), corners, corners.copy()
    rng = rng_for(spec.seed, PAIR_STREAM, index)
    reach = spec.warp_magnitude * min(spec.h, spec.w)
    for _ in range(CORNER_TRIES):
        perturbed = corners + rng.uniform(-reach, reach, size=corners.shape)
        if not _is_convex(perturbed):
            continue
        try:
            return dlt_from_points(corners, perturbed), corners, perturbed
        except DegenerateGeometryException:
            continue
    raise DegenerateGeometryException(f"No convex corner sample in {CORNER_TRIES} tries")


def _nearest_cell(pts: FloatArray, h: int, w: int, stride: float) -> Tuple[FloatArray, FloatArray, FloatArray]:
    """(index, distance in cells, in-bounds flag) of the nearest cell center per point"""
    with np.errstate(invalid="ignore"):
        at = pts / stride - 0.5
        col = np.floor(at[:, 0] + 0.5)
        row = np.floor(at[:, 1] + 0.5)
        dist = np.hypot(at[:, 0] - col, at[:, 1] - row)
        inside = np.isfinite(dist) & (col >= 0) & (col < w) & (row >= 0) & (row < h)
        index = np.where(inside, row * w + col, -1).astype(int)
    return index, dist, inside


def derive_gt_matches(h_gt: Homography, h: int, w: int, stride: float = 1.0) -> GroundTruthMatches:
    """
    Pairs target cell i with reference cell j when h_gt^-1 sends the center of i within
    half a cell of the center of j and h_gt sends the center of j nearest to i
    """
    centers = cell_centers(h, w, stride)
    back = project(h_gt.inverse().matrix, centers)
    ref_idx, dist, inside = _nearest_cell(back, h, w, stride)
    fwd_idx, _, fwd_inside = _nearest_cell(project(h_gt.matrix, centers), h, w, stride)

    pairs: OrderedSet[Tuple[int, int]] = OrderedSet()
    keep: List[int] = []
    for i in range(h * w):
        if not inside[i] or dist[i] > MATCH_RADIUS:
            continue
        j = int(ref_idx[i])
        if fwd_inside[j] and int(fwd_idx[j]) == i:
            pairs.add((i, j))
            keep.append(i)
    return GroundTruthMatches(pairs, centers[keep], back[keep])


def _warp_boxes(boxes: Sequence[BBox], h_gt: Homography, width: int, height: int) -> Tuple[List[BBox], List[int]]:
    kept: List[BBox] = []
    dropped: List[int] = []
    for k, b in enumerate(boxes):
        corners = np.array([[b.x1, b.y1], [b.x2, b.y1], [b.x2, b.y2], [b.x1, b.y2]])
        try:
            q = h_gt.apply_points(corners)
        except DegenerateGeometryException:
            dropped.append(k)
            continue
        lo, hi = q.min(axis=0), q.max(axis=0)
        out = BBox(lo[0], lo[1], hi[0], hi[1], b.class_id).clamped(width, height)
        if out is None:
            dropped.append(k)
        else:
            kept.append(out)
    return kept, dropped


def _noisy(grid: FeatureGrid, sigma: float, rng: np.random.Generator) -> FeatureGrid:
    if sigma == 0.0:
        return grid
    return grid.with_values(Matrix(grid.values.data + sigma * rng.standard_normal(grid.values.shape)))


def _change_background(
    grid: FeatureGrid,
    boxes: Sequence[BBox],
    amount: float,
    sigma: float,
    rng: np.random.Generator,
) -> FeatureGrid:
    if amount == 0.0:
        return grid
    outside = amount * (1.0 - rasterize_boxes(boxes, grid.h, grid.w))[:, None]
    values = grid.values.data
    fresh = sigma * rng.standard_normal(values.shape)
    return grid.with_values(Matrix((1.0 - outside) * values + outside * fresh))


def make_pair(
    ref_clean: FeatureGrid,
    boxes_r: Sequence[BBox],
    spec: SceneSpec,
    index: int = 0,
    h_gt: Optional[Homography] = None,
) -> SceneSample:
    """
    Warps a clean reference scene into a target view. Each view then receives its own
    sensor noise. With a background_change the target background is partly re-textured
    before the noise. Target boxes are the clamped hulls of the warped reference box corners;
    boxes that leave the image entirely are dropped and their reference indices recorded.
    """
    if h_gt is None:
        h_gt, _, _ = random_homography(spec, index)
    h, w = ref_clean.h, ref_clean.w
    ref_grid = _noisy(ref_clean, spec.noise_sigma, rng_for(spec.seed, NOISE_STREAM, index, 0))
    boxes_t, dropped = _warp_boxes(boxes_r, h_gt, w, h)
    warped = warp_grid(ref_clean, h_gt, fill=0.0)
    warped = _change_background(
        warped, boxes_t, spec.background_change, spec.texture_sigma, rng_for(spec.seed, BACKGROUND_STREAM, index)
    )
    tgt_grid = _noisy(warped, spec.noise_sigma, rng_for(spec.seed, NOISE_STREAM, index, 1))

    if dropped:
        logger.warning("sample {index}: {n} box(es) left the target view", index=index, n=len(dropped))
    return SceneSample(
        ref_grid=ref_grid,
        tgt_grid=tgt_grid,
        h_gt=h_gt,
        boxes_r=tuple(boxes_r),
        boxes_t=tuple(boxes_t),
        gt_matches=derive_gt_matches(h_gt, h, w),
        dropped_t=FrozenBitMap(dropped),
        index=index,
        seed=spec.seed,
    )


def make_sample(spec: SceneSpec, index: int = 0) -> SceneSample:
    ref_clean, boxes = generate_scene(spec, index)
    return make_pair(ref_clean, boxes, spec, index)


@timer
def generate_samples(spec: SceneSpec, count: int, offset: int = 0, workers: int = 1) -> List[SceneSample]:
    """Samples offset..offset+count-1; every sample depends only on (spec, index)"""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    indices = range(offset, offset + count)
    if workers <= 1:
        return [make_sample(spec, i) for i in indices]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: make_sample(spec, i), indices))
