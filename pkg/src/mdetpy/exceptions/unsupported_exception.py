from __future__ import annotations

from typing import Any, Optional, TYPE_CHECKING

from .base_exceptions import BaseMatchDetException

if TYPE_CHECKING:
    from ..elements import Component


class UnsupportedException(BaseMatchDetException):
    def __init__(self, component: Optional[Component], value: Any, message: Optional[str] = None) -> None:
        self._value = value
        if not (message and message.strip()):
            where = f" in {component.name}" if component is not None else ""
            message = f"Unsupported{where}: {value!r}"
        super().__init__(component, message.strip())

    @property
    def value(self) -> Any:
        return self._value
