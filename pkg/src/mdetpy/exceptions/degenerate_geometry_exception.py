from __future__ import annotations

from typing import Optional

from .base_exceptions import BaseMatchDetException


class DegenerateGeometryException(BaseMatchDetException):
    def __init__(self, message: Optional[str] = None) -> None:
        from ..elements import Component

        message = message.strip() if message and message.strip() else "Degenerate geometric configuration"
        super().__init__(Component.Geometry, message)
