from __future__ import annotations

from typing import TYPE_CHECKING

from .base_exceptions import BaseMatchDetException

if TYPE_CHECKING:
    from ..elements import Component
    from ..elements import Setting


class MissingInputException(BaseMatchDetException):
    def __init__(self, component: Component, setting: Setting, missing: str) -> None:
        self._setting = setting
        self._missing = missing
        message = f"{setting.label} requires {missing}"
        super().__init__(component, message)

    @property
    def setting(self) -> Setting:
        return self._setting

    @property
    def missing(self) -> str:
        return self._missing
