from __future__ import annotations

from typing import Optional, TYPE_CHECKING

from .base_exceptions import BaseMatchDetException

if TYPE_CHECKING:
    from ..elements import Component


class NonFiniteException(BaseMatchDetException):
    def __init__(self, component: Optional[Component], operation: str, message: Optional[str] = None) -> None:
        self._operation = operation
        if message is None:
            message = f"Non-finite value produced by {operation}"
        super().__init__(component, message)

    @property
    def operation(self) -> str:
        return self._operation
