from __future__ import annotations

from typing import List

import numpy as np
import pytest

from mdetpy.exceptions import DegenerateGeometryException
from mdetpy.exceptions import EstimationFailureException
from mdetpy.geometry import Correspondence
from mdetpy.geometry import Homography
from mdetpy.geometry import corner_error
from mdetpy.geometry import dlt_from_points
from mdetpy.geometry import estimate_dlt
from mdetpy.geometry import ransac_homography
from mdetpy.geometry import reprojection_errors

from ..test_base import TestBase

H_TRUE = Homography([[0.95, 0.08, 1.5], [-0.05, 1.05, -0.75], [2e-3, -1e-3, 1.0]])


class TestDLT(TestBase):
    def test_exact_recovery_from_four_points(self) -> None:
        ref = np.array([[0.0, 0.0], [16.0, 0.0], [16.0, 16.0], [0.0, 16.0]])
        h = dlt_from_points(ref, H_TRUE.apply_points(ref))
        assert h.is_close(H_TRUE, tol=1e-9)

    def test_exact_recovery_overdetermined(self) -> None:
        ref = self.rng.uniform(0.0, 16.0, size=(30, 2))
        corrs = [Correspondence(t, r) for t, r in zip(H_TRUE.apply_points(ref), ref)]
        assert estimate_dlt(corrs).is_close(H_TRUE, tol=1e-9)

    def test_translation(self) -> None:
        ref = self.rng.uniform(0.0, 8.0, size=(6, 2))
        h = dlt_from_points(ref, ref + [1.0, 0.0])
        assert h.is_close(Homography.translation(1.0, 0.0), tol=1e-9)

    def test_too_few_points(self) -> None:
        pts = self.rng.uniform(size=(3, 2))
        with pytest.raises(EstimationFailureException, match="at least 4"):
            dlt_from_points(pts, pts)
        with pytest.raises(EstimationFailureException):
            dlt_from_points(self.rng.uniform(size=(5, 2)), self.rng.uniform(size=(4, 2)))

    def test_degenerate(self) -> None:
        collinear = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.0, 5.0]])
        with pytest.raises(DegenerateGeometryException, match="collinear"):
            dlt_from_points(collinear, collinear)
        same = np.ones((5, 2))
        with pytest.raises(DegenerateGeometryException, match="coincide"):
            dlt_from_points(same, same)

    def test_reprojection_errors(self) -> None:
        ref = np.array([[0.0, 0.0], [1.0, 0.0]])
        tgt = np.array([[1.0, 0.0], [5.0, 3.0]])
        err = reprojection_errors(Homography.translation(1.0, 0.0), ref, tgt)
        np.testing.assert_allclose(err, [0.0, np.sqrt(18.0)])


class TestRansac(TestBase):
    def _corrs(self, n_in: int, n_out: int) -> List[Correspondence]:
        ref = self.rng.uniform(0.0, 16.0, size=(n_in + n_out, 2))
        tgt = H_TRUE.apply_points(ref)
        tgt[n_in:] = self.rng.uniform(0.0, 16.0, size=(n_out, 2)) + 40.0
        return [Correspondence(t, r) for t, r in zip(tgt, ref)]

    def test_clean_data(self) -> None:
        h, inliers = ransac_homography(self._corrs(20, 0), seed=3)
        assert h.is_close(H_TRUE, tol=1e-8)
        assert len(inliers) == 20

    def test_rejects_outliers(self) -> None:
        corrs = self._corrs(24, 12)
        h, inliers = ransac_homography(corrs, iters=500, inlier_px=1.0, seed=5)
        assert h.is_close(H_TRUE, tol=1e-8)
        assert list(inliers) == list(range(24))

    def test_deterministic(self) -> None:
        corrs = self._corrs(10, 10)
        a = ransac_homography(corrs, iters=200, seed=9, confidence=None)
        b = ransac_homography(corrs, iters=200, seed=9, confidence=None)
        assert a[0].is_close(b[0], tol=0.0)
        assert a[1] == b[1]

    def test_too_few(self) -> None:
        with pytest.raises(EstimationFailureException) as e_info:
            ransac_homography(self._corrs(3, 0))
        assert e_info.value.num_correspondences == 3

    def test_all_degenerate(self) -> None:
        pts = [(float(i), float(i)) for i in range(6)]
        corrs = [Correspondence(p, p) for p in pts]
        with pytest.raises(EstimationFailureException, match="No model"):
            ransac_homography(corrs, iters=20)

    def test_inliers_measured_against_refit(self) -> None:
        ref = self.rng.uniform(0.0, 16.0, size=(40, 2))
        tgt = H_TRUE.apply_points(ref) + self.rng.normal(0.0, 0.5, size=(40, 2))
        corrs = [Correspondence(t, r) for t, r in zip(tgt, ref)]
        for seed in range(5):
            h, inliers = ransac_homography(corrs, iters=50, inlier_px=1.0, seed=seed, confidence=None)
            within = np.flatnonzero(reprojection_errors(h, ref, tgt) <= 1.0)
            assert list(inliers) == within.tolist()


FIELD: float = 64.0


def random_bounded_homography(rng: np.random.Generator) -> Homography:
    m = np.eye(3)
    m[:2, :2] += rng.uniform(-0.2, 0.2, size=(2, 2))
    m[:2, 2] = rng.uniform(-5.0, 5.0, size=2)
    m[2, :2] = rng.uniform(-1e-3, 1e-3, size=2)
    return Homography(m)


class TestGeometryProperties(TestBase):
    def test_dlt_reprojection_over_random_homographies(self) -> None:
        worst = 0.0
        for _ in range(500):
            h = random_bounded_homography(self.rng)
            ref = self.rng.uniform(0.0, FIELD, size=(12, 2))
            tgt = h.apply_points(ref)
            est = dlt_from_points(ref, tgt)
            worst = max(worst, float(reprojection_errors(est, ref, tgt).max()))
        assert worst < 1e-9

    def test_dlt_commutes_with_scaling(self) -> None:
        h = random_bounded_homography(self.rng)
        ref = self.rng.uniform(0.0, FIELD, size=(10, 2))
        tgt = h.apply_points(ref)
        for s in (0.25, 4.0):
            est = dlt_from_points(ref * s, tgt * s)
            assert est.is_close(h.conjugate_scale(s), tol=1e-8)

    def test_ransac_with_thirty_percent_outliers(self) -> None:
        good = 0
        for trial in range(100):
            h = random_bounded_homography(self.rng)
            ref = self.rng.uniform(0.0, FIELD, size=(100, 2))
            tgt = h.apply_points(ref)
            tgt[:70] += self.rng.normal(0.0, 0.1, size=(70, 2))
            tgt[70:] = self.rng.uniform(0.0, FIELD, size=(30, 2))
            corrs = [Correspondence(t, r) for t, r in zip(tgt, ref)]
            est, _ = ransac_homography(corrs, iters=1000, inlier_px=3.0, seed=trial)
            if corner_error(est, h, FIELD, FIELD) < 0.5:
                good += 1
        assert good >= 95
