from __future__ import annotations

from typing import Optional

from .base_exceptions import BaseMatchDetException


class EstimationFailureException(BaseMatchDetException):
    def __init__(self, num_correspondences: int, message: Optional[str] = None) -> None:
        from ..elements import Component

        self._num_correspondences = int(num_correspondences)
        if message is None:
            message = f"Homography estimation failed on {self._num_correspondences} correspondences"
        super().__init__(Component.Geometry, message)

    @property
    def num_correspondences(self) -> int:
        return self._num_correspondences
