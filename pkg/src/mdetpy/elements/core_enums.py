"""
Enums shared by every mdetpy component
"""
from __future__ import annotations

from enum import Enum, verify, UNIQUE
from typing import Dict, Tuple, Type, TypeVar

_E = TypeVar("_E", bound="_LabeledEnum")


class _LabeledEnum(Enum):
    """
    Enum whose members are looked up by a case- and punctuation-insensitive label,
    so "GTBoxR", "gtboxr" and "gt-box-r" all resolve to the same member
    """

    @staticmethod
    def _normalize_key(key: str) -> str:
        return "".join(ch for ch in key.strip().lower() if ch.isalnum())

    @classmethod
    def parse(cls: Type[_E], key: str | _E) -> _E:
        if isinstance(key, cls):
            return key
        from ..exceptions import UnsupportedException

        if not isinstance(key, str):
            raise UnsupportedException(None, key, f"{cls.__name__} must be given by name, not {type(key).__name__}")
        nk = cls._normalize_key(key)
        for m in cls:
            if nk in (cls._normalize_key(m.name), cls._normalize_key(m.label)):
                return m
        raise UnsupportedException(None, key, f"Unknown {cls.__name__}: '{key}'")

    @property
    def label(self) -> str:
        v = self.value
        return v[0] if isinstance(v, tuple) else str(v)


@verify(UNIQUE)
class Component(Enum):
    Numerics = 1
    """Dense matrices, tape-based reverse-mode differentiation"""
    Geometry = 2
    """Homographies, DLT, RANSAC, warping, corner-error AUC"""
    Attention = 3
    """Weighted / weighted-spatial attention and the stacked blocks"""
    WeightGen = 4
    """Weight maps, light decoder, box projection loss"""
    MatchHead = 5
    """Dual-softmax scoring, Box Filter, MNN selection, matcher loss"""
    MiniDet = 6
    """Toy dense detection head and detection metrics"""
    SynthData = 7
    """Synthetic warped scene pairs"""
    Harness = 8
    """Pipelines, training, experiments, reports"""


@verify(UNIQUE)
class Setting(_LabeledEnum):
    """Which reference-image boxes are available at inference time"""

    GTBoxR = ("GTBoxR",)
    PreBoxR = ("PreBoxR",)
    NoBoxR = ("NoBoxR",)

    @property
    def uses_reference_boxes(self) -> bool:
        return self != Setting.NoBoxR


@verify(UNIQUE)
class AttentionMode(_LabeledEnum):
    Self = ("self",)
    Cross = ("cross",)
    Weighted = ("weighted",)
    WeightedSpatial = ("weighted-spatial",)

    @property
    def is_weighted(self) -> bool:
        return self in (AttentionMode.Weighted, AttentionMode.WeightedSpatial)


_VARIANT_MODULES: Dict[str, Tuple[bool, bool, bool]] = {
    # (use_wam, use_wsam, use_box_filter)
    "mdbase": (False, False, False),
    "wam": (True, False, False),
    "wam-bf": (True, False, True),
    "wam-wsam": (True, True, False),
    "matchdet": (True, True, True),
}


@verify(UNIQUE)
class Variant(_LabeledEnum):
    """
    Network variants; MDBase and MatchDet bracket the module ablation
    (WAM, WAM + Box Filter, WAM + WSAM) in between
    """

    MDBase = ("mdbase",)
    WAM = ("wam",)
    WAMBoxFilter = ("wam-bf",)
    WAMWSAM = ("wam-wsam",)
    MatchDet = ("matchdet",)

    @property
    def use_wam(self) -> bool:
        return _VARIANT_MODULES[self.label][0]

    @property
    def use_wsam(self) -> bool:
        return _VARIANT_MODULES[self.label][1]

    @property
    def use_box_filter(self) -> bool:
        return _VARIANT_MODULES[self.label][2]

    @property
    def is_baseline(self) -> bool:
        return not (self.use_wam or self.use_wsam or self.use_box_filter)

    @property
    def display_name(self) -> str:
        return {
            Variant.MDBase: "MDBase",
            Variant.WAM: "MatchDet-A",
            Variant.WAMBoxFilter: "MatchDet-AB",
            Variant.WAMWSAM: "MatchDet-AS",
            Variant.MatchDet: "MatchDet",
        }[self]


@verify(UNIQUE)
class ReportFormat(_LabeledEnum):
    CSV = ("csv",)
    JSON = ("json",)
