from __future__ import annotations

from typing import Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from ..elements import Component


class BaseMatchDetException(RuntimeError):
    def __init__(self, component: Optional[Component] = None, message: Optional[str] = None) -> None:
        super().__init__(message)
        self._component = component
        self._message = message

    @property
    def component(self) -> Optional[Component]:
        return self._component

    @property
    def message(self) -> Optional[str]:
        return self._message
