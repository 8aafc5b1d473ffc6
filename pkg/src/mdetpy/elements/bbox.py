from __future__ import annotations

from typing import Any, Dict, Mapping, Optional, Tuple

import attrs


@attrs.frozen
class BBox:
    """Axis-aligned box in pixel coordinates; class ids run 1..num_classes"""

    x1: float = attrs.field(converter=float)
    y1: float = attrs.field(converter=float)
    x2: float = attrs.field(converter=float)
    y2: float = attrs.field(converter=float)
    class_id: int = attrs.field(default=1, converter=int)

    @x2.validator
    def _vet_x(self, _: attrs.Attribute, value: float) -> None:
        if not self.x1 < value:
            raise ValueError(f"BBox requires x1 < x2, got {self.x1} >= {value}")

    @y2.validator
    def _vet_y(self, _: attrs.Attribute, value: float) -> None:
        if not self.y1 < value:
            raise ValueError(f"BBox requires y1 < y2, got {self.y1} >= {value}")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> BBox:
        return cls(d["x1"], d["y1"], d["x2"], d["y2"], d.get("class", 1))

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def center(self) -> Tuple[float, float]:
        return 0.5 * (self.x1 + self.x2), 0.5 * (self.y1 + self.y2)

    def contains(self, x: float, y: float) -> bool:
        """Strict interior test, used for cell-center rasterization"""
        return self.x1 < x < self.x2 and self.y1 < y < self.y2

    def scaled(self, factor: float) -> BBox:
        return BBox(self.x1 * factor, self.y1 * factor, self.x2 * factor, self.y2 * factor, self.class_id)

    def clamped(self, width: float, height: float) -> Optional[BBox]:
        """Clips to [0, width] x [0, height]; None when nothing of the box remains in view"""
        x1, y1 = max(self.x1, 0.0), max(self.y1, 0.0)
        x2, y2 = min(self.x2, float(width)), min(self.y2, float(height))
        if x1 >= x2 or y1 >= y2:
            return None
        return BBox(x1, y1, x2, y2, self.class_id)

    def to_dict(self) -> Dict[str, Any]:
        return {"x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2, "class": self.class_id}


@attrs.frozen
class Detection:
    box: BBox
    score: float = attrs.field(converter=float)

    @score.validator
    def _vet_score(self, _: attrs.Attribute, value: float) -> None:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"Detection score must lie in [0, 1], got {value}")

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Detection:
        return cls(BBox.from_dict(d), d["score"])

    @property
    def class_id(self) -> int:
        return self.box.class_id

    def to_dict(self) -> Dict[str, Any]:
        return {**self.box.to_dict(), "score": self.score}
