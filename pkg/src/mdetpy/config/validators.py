from __future__ import annotations

from abc import ABC, abstractmethod
from numbers import Number
from typing import Any, Collection

import attrs


class ConstraintViolationError(ValueError):
    """A coerced configuration value fails its property's constraint"""


class ConfigValidator(ABC):
    @abstractmethod
    def validate(self, value: Any) -> None:
        ...


@attrs.frozen
class NumericRange(ConfigValidator):
    """Closed interval [min_value, max_value]; None passes unless the range is required"""

    min_value: float
    max_value: float = float("inf")

    def __attrs_post_init__(self) -> None:
        if self.max_value < self.min_value:
            raise ValueError("Minimum value must be less than or equal to maximum value.")

    @property
    def required(self) -> bool:
        return False

    def validate(self, value: Any) -> None:
        if value is None:
            if self.required:
                raise ConstraintViolationError("Required")
            return
        if isinstance(value, bool) or not isinstance(value, Number):
            raise ConstraintViolationError("Numeric Value Required")
        if value < self.min_value:  # type: ignore[operator]
            raise ConstraintViolationError(f"Too Small (min {self.min_value})")
        if value > self.max_value:  # type: ignore[operator]
            raise ConstraintViolationError(f"Too Large (max {self.max_value})")


@attrs.frozen
class NumericRangeRequired(NumericRange):
    @property
    def required(self) -> bool:
        return True


@attrs.frozen
class Positive(NumericRangeRequired):
    """Strictly greater than zero"""

    min_value: float = 0.0

    def validate(self, value: Any) -> None:
        super().validate(value)
        if value <= 0:
            raise ConstraintViolationError("Must Be Positive")


class OneOf(ConfigValidator):
    def __init__(self, choices: Collection[Any]) -> None:
        if not choices:
            raise ValueError("OneOf needs at least one choice.")
        self._choices = tuple(choices)

    def validate(self, value: Any) -> None:
        if value not in self._choices:
            raise ConstraintViolationError(f"Not One Of {[getattr(c, 'label', c) for c in self._choices]}")
