from __future__ import annotations

import json
from typing import Any, Dict, Final, Iterator, Optional, Tuple

import attrs
import numpy as np
from ordered_set import OrderedSet

from ..numerics import Matrix

THETA: Final = 0.2


@attrs.frozen
class Match:
    i: int
    j: int
    p: float

    def to_dict(self) -> Dict[str, Any]:
        return {"i": self.i, "j": self.j, "p": self.p}


@attrs.frozen
class MatchSet:
    """Mutual-nearest-neighbour cell matches, in target-cell order"""

    pairs: Tuple[Match, ...]
    theta: float
    tau: Optional[float] = None

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Match]:
        return iter(self.pairs)

    @property
    def indices(self) -> OrderedSet[Tuple[int, int]]:
        return OrderedSet((m.i, m.j) for m in self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        return {"theta": self.theta, "tau": self.tau, "matches": [m.to_dict() for m in self.pairs]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> MatchSet:
        pairs = tuple(Match(int(m["i"]), int(m["j"]), float(m["p"])) for m in d["matches"])
        return cls(pairs, float(d["theta"]), d.get("tau"))


def mnn_select(p: Matrix | np.ndarray, theta: float = THETA, tau: Optional[float] = None) -> MatchSet:
    """
    Keeps (i, j) when j is the argmax of row i, i is the argmax of column j and
    P(i, j) >= theta. Ties go to the lowest index.
    """
    if theta < 0.0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    pv = p.data if isinstance(p, Matrix) else np.asarray(p, dtype=np.float64)
    if pv.size == 0:
        return MatchSet((), theta, tau)
    row_best = pv.argmax(axis=1)
    col_best = pv.argmax(axis=0)
    pairs = []
    for i, j in enumerate(row_best):
        if col_best[j] == i and pv[i, j] >= theta:
            pairs.append(Match(int(i), int(j), float(pv[i, j])))
    return MatchSet(tuple(pairs), theta, tau)
