from __future__ import annotations

from .core_enums import Component as Component
from .core_enums import Setting as Setting
from .core_enums import AttentionMode as AttentionMode
from .core_enums import Variant as Variant
from .core_enums import ReportFormat as ReportFormat

from .bbox import BBox as BBox
from .bbox import Detection as Detection
from .feature_grid import FeatureGrid as FeatureGrid
from .weight_map import WeightMap as WeightMap
from .weight_map import SegMask as SegMask
