from __future__ import annotations

from typing import Optional

from .base_exceptions import BaseMatchDetException


class InvalidConfigException(BaseMatchDetException):
    def __init__(self, key: Optional[str], message: Optional[str] = None) -> None:
        from ..elements import Component

        self._key = key.strip() if key and key.strip() else None
        if self._key is None:
            message = message or "Invalid configuration"
        else:
            message = f"Invalid: config->'{self._key}'" + (f": {message}" if message else "")
        super().__init__(Component.Harness, message)

    @property
    def key(self) -> Optional[str]:
        return self._key
