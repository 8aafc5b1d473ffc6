from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Optional

from .non_finite_exception import NonFiniteException


class NonFiniteLossException(NonFiniteException):
    def __init__(self, snapshot: Dict[str, Any], snapshot_path: Optional[Path] = None) -> None:
        from ..elements import Component

        self._snapshot = dict(snapshot)
        self._snapshot_path = snapshot_path
        message = f"Non-finite loss at epoch {snapshot.get('epoch')} step {snapshot.get('step')}"
        if snapshot_path is not None:
            message += f" (snapshot: {snapshot_path})"
        super().__init__(Component.Harness, "train", message)

    @property
    def snapshot(self) -> Dict[str, Any]:
        return self._snapshot

    @property
    def snapshot_path(self) -> Optional[Path]:
        return self._snapshot_path
