from __future__ import annotations

from typing import Any, Dict, Final, List, Tuple

import attrs
import numpy as np

from ..elements import BBox
from ..elements import FeatureGrid
from ..numerics import FloatArray
from ..utils import rng_for

MAX_WARP_MAGNITUDE: Final = 0.25
PLACEMENT_TRIES: Final = 20

# seed streams
SIGNATURE_STREAM: Final = 1
SCENE_STREAM: Final = 2
PAIR_STREAM: Final = 3
NOISE_STREAM: Final = 4
BACKGROUND_STREAM: Final = 5


def _non_negative(_: object, attribute: attrs.Attribute, value: float) -> None:
    if value < 0:
        raise ValueError(f"{attribute.name} must be >= 0, got {value}")


def _at_least_one(_: object, attribute: attrs.Attribute, value: int) -> None:
    if value < 1:
        raise ValueError(f"{attribute.name} must be >= 1, got {value}")


@attrs.frozen
class SceneSpec:
    """
    Synthetic scene recipe. Grids are h x w cells of c channels at stride 1, so box
    coordinates in pixels equal cell coordinates. Each scene holds between min_objects
    and n_objects objects of side min_size..max_size cells. background_change blends
    that fraction of fresh texture into the target view outside its boxes, so background
    cells stop matching across views while objects keep their appearance.
    """

    h: int = attrs.field(default=16, converter=int, validator=_at_least_one)
    w: int = attrs.field(default=16, converter=int, validator=_at_least_one)
    c: int = attrs.field(default=16, converter=int, validator=_at_least_one)
    n_objects: int = attrs.field(default=3, converter=int, validator=_non_negative)
    min_objects: int = attrs.field(default=1, converter=int, validator=_non_negative)
    num_classes: int = attrs.field(default=4, converter=int, validator=_at_least_one)
    noise_sigma: float = attrs.field(default=0.1, converter=float, validator=_non_negative)
    texture_sigma: float = attrs.field(default=0.25, converter=float, validator=_non_negative)
    warp_magnitude: float = attrs.field(default=0.15, converter=float, validator=_non_negative)
    background_change: float = attrs.field(default=0.0, converter=float, validator=_non_negative)
    min_size: int = attrs.field(default=3, converter=int, validator=_at_least_one)
    max_size: int = attrs.field(default=6, converter=int, validator=_at_least_one)
    seed: int = attrs.field(default=0, converter=int)

    @warp_magnitude.validator
    def _vet_warp(self, _: attrs.Attribute, value: float) -> None:
        if value > MAX_WARP_MAGNITUDE:
            raise ValueError(f"warp_magnitude must be <= {MAX_WARP_MAGNITUDE}, got {value}")

    @background_change.validator
    def _vet_background(self, _: attrs.Attribute, value: float) -> None:
        if value > 1.0:
            raise ValueError(f"background_change must be <= 1, got {value}")

    @max_size.validator
    def _vet_size(self, _: attrs.Attribute, value: int) -> None:
        if value < self.min_size:
            raise ValueError(f"max_size {value} < min_size {self.min_size}")

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> SceneSpec:
        names = {a.name for a in attrs.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise KeyError(f"Unknown SceneSpec keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> Dict[str, Any]:
        return attrs.asdict(self)

    def with_overrides(self, **kw: Any) -> SceneSpec:
        return attrs.evolve(self, **kw)


def class_signatures(spec: SceneSpec) -> FloatArray:
    """num_classes x c unit rows, fixed for a given spec seed"""
    sig = rng_for(spec.seed, SIGNATURE_STREAM).standard_normal((spec.num_classes, spec.c))
    return sig / np.linalg.norm(sig, axis=1, keepdims=True)


def _place(rng: np.random.Generator, spec: SceneSpec, taken: np.ndarray) -> Tuple[int, int, int, int] | None:
    for _ in range(PLACEMENT_TRIES):
        bw = int(rng.integers(spec.min_size, spec.max_size + 1))
        bh = int(rng.integers(spec.min_size, spec.max_size + 1))
        if bw > spec.w or bh > spec.h:
            continue
        x0 = int(rng.integers(0, spec.w - bw + 1))
        y0 = int(rng.integers(0, spec.h - bh + 1))
        if not taken[y0 : y0 + bh, x0 : x0 + bw].any():
            return x0, y0, bw, bh
    return None


def generate_scene(spec: SceneSpec, index: int = 0) -> Tuple[FeatureGrid, List[BBox]]:
    """
    A noise-free scene: a random background texture with non-overlapping rectangular
    objects stamped with their class signature. Objects that find no free spot are
    skipped, so the box count can fall short of the drawn object count.
    """
    rng = rng_for(spec.seed, SCENE_STREAM, index)
    grid = spec.texture_sigma * rng.standard_normal((spec.h, spec.w, spec.c))
    signatures = class_signatures(spec)

    lo = min(spec.min_objects, spec.n_objects)
    count = int(rng.integers(lo, spec.n_objects + 1))
    taken = np.zeros((spec.h, spec.w), dtype=bool)
    boxes: List[BBox] = []
    for _ in range(count):
        cls = int(rng.integers(1, spec.num_classes + 1))
        spot = _place(rng, spec, taken)
        if spot is None:
            continue
        x0, y0, bw, bh = spot
        taken[y0 : y0 + bh, x0 : x0 + bw] = True
        grid[y0 : y0 + bh, x0 : x0 + bw] += signatures[cls - 1]
        boxes.append(BBox(x0, y0, x0 + bw, y0 + bh, cls))
    return FeatureGrid.from_array(grid), boxes
