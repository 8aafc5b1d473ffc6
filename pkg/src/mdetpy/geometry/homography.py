from __future__ import annotations

import json
from typing import Any, Final, List, Sequence, Tuple

import attrs
import numpy as np

from ..elements import Component
from ..exceptions import DegenerateGeometryException
from ..exceptions import NonFiniteException
from ..exceptions import ShapeMismatchException
from ..numerics import FloatArray

EPS: Final = 1e-12

Point = Tuple[float, float]


class Homography:
    """
    3x3 projective transform in pixel coordinates mapping reference points to target
    points. Stored normalized: h[2][2] = 1 when that entry is nonzero, else unit
    Frobenius norm.
    """

    __slots__ = ("_h",)

    @classmethod
    def identity(cls) -> Homography:
        return cls(np.eye(3))

    @classmethod
    def translation(cls, tx: float, ty: float) -> Homography:
        return cls(np.array([[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]]))

    @classmethod
    def scaling(cls, sx: float, sy: float | None = None) -> Homography:
        return cls(np.diag([sx, sx if sy is None else sy, 1.0]))

    @classmethod
    def from_list(cls, values: Sequence[float]) -> Homography:
        if len(values) != 9:
            raise ShapeMismatchException(Component.Geometry, "Homography.from_list", (len(values),), (9,))
        return cls(np.asarray(values, dtype=np.float64).reshape(3, 3))

    @classmethod
    def from_json(cls, s: str) -> Homography:
        return cls.from_list(json.loads(s))

    def __init__(self, h: Any) -> None:
        m = np.array(h, dtype=np.float64)
        if m.shape != (3, 3):
            raise ShapeMismatchException(Component.Geometry, "Homography", m.shape, (3, 3))
        if not np.all(np.isfinite(m)):
            raise NonFiniteException(Component.Geometry, "Homography")
        if abs(m[2, 2]) > EPS:
            m = m / m[2, 2]
        else:
            norm = float(np.linalg.norm(m))
            if norm <= EPS:
                raise DegenerateGeometryException("Homography is the zero matrix")
            m = m / norm
        if abs(float(np.linalg.det(m))) <= EPS:
            raise DegenerateGeometryException("Homography is not invertible")
        m.flags.writeable = False
        self._h: FloatArray = m

    def __repr__(self) -> str:
        return f"Homography({self.to_list()})"

    def __matmul__(self, other: Homography) -> Homography:
        """Composition: (self @ other) applies other first"""
        return Homography(self._h @ other._h)

    @property
    def matrix(self) -> FloatArray:
        return self._h

    @property
    def det(self) -> float:
        return float(np.linalg.det(self._h))

    def inverse(self) -> Homography:
        return Homography(np.linalg.inv(self._h))

    def conjugate_scale(self, s: float) -> Homography:
        """S H S^-1 with S = diag(s, s, 1); re-expresses the map in coordinates scaled by s"""
        scale = np.diag([s, s, 1.0])
        return Homography(scale @ self._h @ np.diag([1.0 / s, 1.0 / s, 1.0]))

    def apply(self, x: float, y: float) -> Point:
        out = self.apply_points(np.array([[x, y]], dtype=np.float64))
        return float(out[0, 0]), float(out[0, 1])

    def apply_points(self, pts: Any) -> FloatArray:
        """Maps an n x 2 array of points; any point sent to infinity is an error"""
        p = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        q = project(self._h, p)
        if not np.all(np.isfinite(q)):
            raise DegenerateGeometryException("Point maps to infinity")
        return q

    def is_close(self, other: Homography, tol: float = 1e-9) -> bool:
        return bool(np.allclose(self._h, other._h, rtol=0.0, atol=tol))

    def to_list(self) -> List[float]:
        return [float(v) for v in self._h.reshape(-1)]

    def to_json(self) -> str:
        return json.dumps(self.to_list())


def project(h: FloatArray, pts: FloatArray) -> FloatArray:
    """
    Raw projection of n x 2 points through a 3x3 matrix; rows whose w falls within EPS
    of zero come back as inf
    """
    ph = np.c_[pts, np.ones(len(pts))] @ h.T
    w = ph[:, 2]
    bad = np.abs(w) <= EPS
    w_s = np.where(bad, 1.0, w)
    out = ph[:, :2] / w_s[:, None]
    out[bad] = np.inf
    return out


@attrs.frozen
class Correspondence:
    """A reference point and the target point it is believed to map to"""

    p_t: Point = attrs.field(converter=lambda p: (float(p[0]), float(p[1])))
    p_r: Point = attrs.field(converter=lambda p: (float(p[0]), float(p[1])))
    score: float = attrs.field(default=1.0, converter=float)

    @p_t.validator
    def _vet_points(self, _: attrs.Attribute, value: Point) -> None:
        if not np.all(np.isfinite(value)):
            raise NonFiniteException(Component.Geometry, "Correspondence")

    @p_r.validator
    def _vet_ref(self, attribute: attrs.Attribute, value: Point) -> None:
        self._vet_points(attribute, value)


def as_point_arrays(corrs: Sequence[Correspondence]) -> Tuple[FloatArray, FloatArray]:
    """(reference n x 2, target n x 2)"""
    if not corrs:
        return np.zeros((0, 2)), np.zeros((0, 2))
    ref = np.array([c.p_r for c in corrs], dtype=np.float64)
    tgt = np.array([c.p_t for c in corrs], dtype=np.float64)
    return ref, tgt
