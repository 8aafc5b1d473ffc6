from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from threading import RLock
from typing import Any, Dict, Final, Iterator, List, Optional

import numpy as np

from ..elements import Component
from ..elements import ReportFormat
from ..exceptions import ShapeMismatchException
from ..exceptions import UnsupportedException
from .matrix import FloatArray, Matrix, as_float_array
from .tape import Gradients, Tape

_CHECKPOINT_FORMAT: Final = "mdetpy-params"
_CHECKPOINT_VERSION: Final = 1


class Parameters(Mapping[str, FloatArray]):
    """
    Ordered, named collection of learnable arrays. Iteration follows insertion order,
    which fixes the summation and update order used by the optimizer.
    """

    __slots__ = ("_values", "_velocity", "_lock")

    def __init__(self, values: Optional[Mapping[str, Any]] = None) -> None:
        self._values: Dict[str, FloatArray] = {}
        self._velocity: Dict[str, FloatArray] = {}
        self._lock = RLock()
        if values:
            for name, value in values.items():
                self.add(name, value)

    def __repr__(self) -> str:
        return f"Parameters({len(self)} arrays, {self.num_values} values)"

    def __getitem__(self, name: str) -> FloatArray:
        v = self._values[name]
        view = v.view()
        view.flags.writeable = False
        return view

    def __iter__(self) -> Iterator[str]:
        return iter(list(self._values))

    def __len__(self) -> int:
        return len(self._values)

    @property
    def num_values(self) -> int:
        return int(sum(v.size for v in self._values.values()))

    def add(self, name: str, value: Any) -> None:
        key = name.strip()
        with self._lock:
            if key in self._values:
                raise KeyError(f"Parameters: name '{key}' not unique")
            self._values[key] = as_float_array(value).copy()

    def names(self, prefix: Optional[str] = None) -> List[str]:
        return [n for n in self._values if prefix is None or n.startswith(prefix)]

    def copy(self) -> Parameters:
        return Parameters(self._values)

    def bind(self, tape: Optional[Tape] = None) -> Dict[str, Matrix]:
        """Matrices for every array: tracked leaves on tape, or plain constants without one"""
        if tape is None:
            return {n: Matrix(v) for n, v in self._values.items()}
        return {n: tape.leaf(v, n) for n, v in self._values.items()}

    @staticmethod
    def collect(grads: Gradients, bound: Mapping[str, Matrix]) -> Dict[str, FloatArray]:
        return {n: grads[m] for n, m in bound.items()}

    def apply_sgd(
        self,
        grads: Mapping[str, FloatArray],
        lr: float,
        momentum: float = 0.0,
        weight_decay: float = 0.0,
        clip: float = 0.0,
    ) -> float:
        """
        One SGD step with optional heavy-ball momentum, L2 weight decay and global-norm
        clipping. Returns the pre-clipping gradient norm.
        """
        with self._lock:
            total = 0.0
            for name in self._values:
                g = grads.get(name)
                if g is not None:
                    total += float(np.sum(g * g))
            norm = float(np.sqrt(total))
            factor = clip / norm if clip > 0.0 and norm > clip else 1.0
            for name, value in self._values.items():
                g = grads.get(name)
                if g is None:
                    continue
                if g.shape != value.shape:
                    raise ShapeMismatchException(Component.Numerics, f"apply_sgd[{name}]", g.shape, value.shape)
                step = g * factor + weight_decay * value
                if momentum > 0.0:
                    v = self._velocity.get(name)
                    v = step if v is None else momentum * v + step
                    self._velocity[name] = v
                    step = v
                value -= lr * step
            return norm

    # checkpoints
    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": _CHECKPOINT_FORMAT,
            "version": _CHECKPOINT_VERSION,
            "params": [
                {"name": n, "shape": list(v.shape), "data": v.reshape(-1).tolist()} for n, v in self._values.items()
            ],
        }

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> Parameters:
        if d.get("format") != _CHECKPOINT_FORMAT:
            raise UnsupportedException(Component.Numerics, d.get("format"), "Not an mdetpy parameter checkpoint")
        p = cls()
        for entry in d["params"]:
            p.add(entry["name"], np.asarray(entry["data"], dtype=np.float64).reshape(entry["shape"]))
        return p

    def save(self, path: Path | str, fmt: ReportFormat | str = ReportFormat.JSON) -> Path:
        """JSON, or a JSON shape header line followed by little-endian f64 payloads"""
        path = Path(path)
        fmt = ReportFormat.parse(fmt)
        if fmt == ReportFormat.JSON:
            path.write_text(json.dumps(self.to_dict()))
        else:
            header = {
                "format": _CHECKPOINT_FORMAT,
                "version": _CHECKPOINT_VERSION,
                "params": [{"name": n, "shape": list(v.shape)} for n, v in self._values.items()],
            }
            with path.open("wb") as f:
                f.write(json.dumps(header).encode("utf-8") + b"\n")
                for v in self._values.values():
                    f.write(np.ascontiguousarray(v, dtype="<f8").tobytes())
        return path

    @classmethod
    def load(cls, path: Path | str) -> Parameters:
        raw = Path(path).read_bytes()
        if raw[:1] == b"{" and b"\n" in raw and raw.split(b"\n", 1)[1]:
            head, payload = raw.split(b"\n", 1)
            header = json.loads(head)
            p = cls()
            offset = 0
            for entry in header["params"]:
                n = int(np.prod(entry["shape"]))
                arr = np.frombuffer(payload, dtype="<f8", count=n, offset=offset).astype(np.float64)
                p.add(entry["name"], arr.reshape(entry["shape"]))
                offset += 8 * n
            return p
        return cls.from_dict(json.loads(raw))
