from __future__ import annotations

from typing import Optional, Sequence, TYPE_CHECKING

from .base_exceptions import BaseMatchDetException

if TYPE_CHECKING:
    from ..elements import Component


class ShapeMismatchException(BaseMatchDetException):
    def __init__(
        self,
        component: Optional[Component],
        operation: str,
        *shapes: Sequence[int],
    ) -> None:
        self._operation = operation
        self._shapes = tuple(tuple(s) for s in shapes)
        message = f"Shape mismatch in {operation}: {' vs '.join(str(s) for s in self._shapes)}"
        super().__init__(component, message)

    @property
    def operation(self) -> str:
        return self._operation

    @property
    def shapes(self) -> tuple[tuple[int, ...], ...]:
        return self._shapes
