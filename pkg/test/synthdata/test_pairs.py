from __future__ import annotations

import numpy as np
import pytest

from mdetpy.elements import BBox
from mdetpy.elements import FeatureGrid
from mdetpy.geometry import Homography
from mdetpy.geometry import corner_error
from mdetpy.geometry import dlt_from_points
from mdetpy.synthdata import SceneSpec
from mdetpy.synthdata import derive_gt_matches
from mdetpy.synthdata import generate_samples
from mdetpy.synthdata import make_pair
from mdetpy.synthdata import make_sample
from mdetpy.synthdata import random_homography

from ..test_base import TestBase


class TestRandomHomography(TestBase):
    def test_zero_magnitude_is_identity(self) -> None:
        h, corners, perturbed = random_homography(SceneSpec(warp_magnitude=0.0))
        assert h.is_close(Homography.identity())
        np.testing.assert_array_equal(corners, perturbed)

    def test_fits_perturbed_corners(self) -> None:
        spec = SceneSpec(h=12, w=10, warp_magnitude=0.2, seed=9)
        for index in range(5):
            h, corners, perturbed = random_homography(spec, index)
            np.testing.assert_allclose(h.apply_points(corners), perturbed, atol=1e-9)
            assert np.all(np.abs(perturbed - corners) <= 0.2 * 10)
            assert dlt_from_points(corners, perturbed).is_close(h, 1e-9)

    def test_deterministic_per_index(self) -> None:
        spec = SceneSpec(seed=4)
        assert random_homography(spec, 2)[0].is_close(random_homography(spec, 2)[0])
        assert not random_homography(spec, 2)[0].is_close(random_homography(spec, 3)[0])


class TestDeriveMatches(TestBase):
    def test_identity(self) -> None:
        gt = derive_gt_matches(Homography.identity(), 3, 4)
        assert gt.to_list() == [[i, i] for i in range(12)]
        assert len(gt) == 12
        np.testing.assert_allclose(gt.tgt_points, gt.ref_points)

    def test_translation_leaves_first_column_unmatched(self) -> None:
        gt = derive_gt_matches(Homography.translation(1.0, 0.0), 3, 4)
        expected = [(r * 4 + c, r * 4 + c - 1) for r in range(3) for c in range(1, 4)]
        assert list(gt) == expected
        assert (0, 0) not in gt
        corrs = gt.correspondences()
        assert len(corrs) == 9
        assert corrs[0].p_t == pytest.approx((1.5, 0.5))
        assert corrs[0].p_r == pytest.approx((0.5, 0.5))

    def test_stride(self) -> None:
        gt = derive_gt_matches(Homography.translation(4.0, 0.0), 2, 3, stride=4.0)
        assert gt.to_list() == [[1, 0], [2, 1], [4, 3], [5, 4]]

    def test_extreme_warp_has_no_matches(self) -> None:
        assert len(derive_gt_matches(Homography.scaling(0.1), 4, 4)) == 0

    def test_mutual_consistency_under_zoom(self) -> None:
        # a 2x zoom sends several target cells to each reference cell; only one of them survives
        gt = derive_gt_matches(Homography.scaling(2.0), 4, 4)
        refs = [j for _, j in gt]
        assert len(refs) == len(set(refs))


class TestMakePair(TestBase):
    def setup_method(self) -> None:
        super().setup_method()
        self.spec = SceneSpec(h=4, w=5, c=3, noise_sigma=0.0, seed=1)
        self.ref = self.random_grid(4, 5, 3)

    def test_translation_shifts_grid_and_boxes(self) -> None:
        boxes = [BBox(0, 0, 2, 2, 1), BBox(3, 1, 5, 3, 2)]
        sample = make_pair(self.ref, boxes, self.spec, index=7, h_gt=Homography.translation(1.0, 0.0))
        tgt = sample.tgt_grid.numpy()
        np.testing.assert_array_equal(tgt[:, 1:], self.ref.numpy()[:, :-1])
        assert not tgt[:, 0].any()
        np.testing.assert_array_equal(sample.ref_grid.numpy(), self.ref.numpy())
        assert sample.boxes_t == (BBox(1, 0, 3, 2, 1), BBox(4, 1, 5, 3, 2))
        assert sample.boxes_r == tuple(boxes)
        assert len(sample.dropped_t) == 0
        assert (sample.index, sample.seed) == (7, 1)
        assert (sample.h, sample.w) == (4, 5)

    def test_boxes_leaving_the_view_are_dropped(self) -> None:
        boxes = [BBox(0, 0, 2, 2, 1), BBox(3, 1, 5, 3, 2)]
        with self.captured_logs("WARNING") as logs:
            sample = make_pair(self.ref, boxes, self.spec, h_gt=Homography.translation(2.5, 0.0))
        assert sample.boxes_t == (BBox(2.5, 0, 4.5, 2, 1),)
        assert list(sample.dropped_t) == [1]
        assert logs == ["WARNING sample 0: 1 box(es) left the target view"]

    def test_noise_is_independent_per_view(self) -> None:
        spec = self.spec.with_overrides(noise_sigma=0.5)
        sample = make_pair(self.ref, [], spec, h_gt=Homography.identity())
        d_r = sample.ref_grid.numpy() - self.ref.numpy()
        d_t = sample.tgt_grid.numpy() - self.ref.numpy()
        assert np.abs(d_r).max() > 0.0
        assert not np.allclose(d_r, d_t)

    def test_background_change_spares_objects(self) -> None:
        boxes = [BBox(0, 0, 2, 2, 1)]
        full = make_pair(self.ref, boxes, self.spec.with_overrides(background_change=1.0), h_gt=Homography.identity())
        half = make_pair(self.ref, boxes, self.spec.with_overrides(background_change=0.5), h_gt=Homography.identity())
        ref, tgt = self.ref.numpy(), full.tgt_grid.numpy()
        fg = np.zeros((4, 5), dtype=bool)
        fg[:2, :2] = True
        np.testing.assert_array_equal(tgt[fg], ref[fg])
        np.testing.assert_array_equal(half.tgt_grid.numpy()[fg], ref[fg])
        assert np.all(tgt[~fg] != ref[~fg])
        np.testing.assert_allclose(half.tgt_grid.numpy()[~fg], 0.5 * ref[~fg] + 0.5 * tgt[~fg], atol=1e-12)
        np.testing.assert_array_equal(full.ref_grid.numpy(), ref)

    def test_random_warp_matches_are_consistent(self) -> None:
        sample = make_sample(SceneSpec(h=8, w=8, c=4, seed=2), 0)
        assert len(sample.gt_matches) > 0
        back = sample.h_gt.inverse().apply_points(sample.gt_matches.tgt_points)
        np.testing.assert_allclose(back, sample.gt_matches.ref_points, atol=1e-9)

    def test_matches_recover_the_warp(self) -> None:
        spec = SceneSpec(h=12, w=12, c=2, warp_magnitude=0.2, seed=6)
        for index in range(20):
            sample = make_sample(spec, index)
            gt = sample.gt_matches
            assert len(gt) >= 4
            fitted = dlt_from_points(gt.ref_points, gt.tgt_points)
            assert corner_error(fitted, sample.h_gt, 12, 12) < 0.1
            cells = np.array([[i % 12 + 0.5, i // 12 + 0.5] for i, _ in gt])
            np.testing.assert_array_equal(gt.tgt_points, cells)


class TestGenerateSamples(TestBase):
    def test_deterministic_and_offset(self) -> None:
        spec = SceneSpec(h=6, w=6, c=3, seed=5)
        a = generate_samples(spec, 3)
        b = generate_samples(spec, 2, offset=1, workers=2)
        assert [s.index for s in a] == [0, 1, 2]
        assert [s.index for s in b] == [1, 2]
        for x, y in zip(a[1:], b):
            np.testing.assert_array_equal(x.tgt_grid.numpy(), y.tgt_grid.numpy())
            assert x.h_gt.is_close(y.h_gt, 0.0)
            assert x.boxes_t == y.boxes_t
            assert x.gt_matches.to_list() == y.gt_matches.to_list()

    def test_count(self) -> None:
        assert generate_samples(SceneSpec(h=4, w=4, c=2), 0) == []
        with pytest.raises(ValueError, match="count must be >= 0"):
            generate_samples(SceneSpec(), -1)

    def test_grids(self) -> None:
        sample = generate_samples(SceneSpec(h=5, w=7, c=2), 1)[0]
        assert isinstance(sample.ref_grid, FeatureGrid)
        assert sample.ref_grid.shape == sample.tgt_grid.shape == (5, 7, 2)
