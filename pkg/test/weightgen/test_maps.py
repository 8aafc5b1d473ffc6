from __future__ import annotations

import numpy as np
import pytest

from mdetpy.elements import BBox
from mdetpy.elements import SegMask
from mdetpy.elements import Setting
from mdetpy.elements import WeightMap
from mdetpy.exceptions import MissingInputException
from mdetpy.geometry import Homography
from mdetpy.weightgen import box_filter_maps
from mdetpy.weightgen import generate_wam_maps
from mdetpy.weightgen import generate_wsam_maps
from mdetpy.weightgen import map_from_boxes
from mdetpy.weightgen import map_from_mask
from mdetpy.weightgen import rasterize_boxes

from ..test_base import TestBase


class TestRasterize(TestBase):
    def test_cell_centers_inside(self) -> None:
        r = rasterize_boxes([BBox(1, 0, 3, 2)], 3, 4).reshape(3, 4)
        np.testing.assert_array_equal(r, [[0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 0]])

    def test_center_on_edge_is_outside(self) -> None:
        assert not rasterize_boxes([BBox(0, 0, 1.5, 1.5)], 2, 2)[3]
        assert rasterize_boxes([BBox(0, 0, 1.5, 1.5)], 2, 2)[0]

    def test_union_and_stride(self) -> None:
        r = rasterize_boxes([BBox(0, 0, 8, 8), BBox(8, 8, 16, 16)], 2, 2, stride=8.0)
        np.testing.assert_array_equal(r, [1, 0, 0, 1])
        assert not rasterize_boxes([], 2, 2).any()

    def test_map_from_boxes(self) -> None:
        m = map_from_boxes([BBox(0, 0, 1, 1)], 2, 2, emphasis=0.5)
        np.testing.assert_array_equal(m.values, [1.5, 1.0, 1.0, 1.0])
        assert map_from_boxes([], 2, 2).is_uniform()
        with pytest.raises(ValueError, match="emphasis must be >= 0"):
            map_from_boxes([], 2, 2, emphasis=-1.0)

    def test_map_from_mask(self) -> None:
        mask = SegMask.from_array(2, 2, [0.2, 0.5, 0.51, 1.0])
        np.testing.assert_array_equal(map_from_mask(mask).values, [1.0, 1.0, 2.0, 2.0])
        np.testing.assert_array_equal(map_from_mask(mask, threshold=0.1, emphasis=3.0).values, [4.0] * 4)


class TestWAMMaps(TestBase):
    def setup_method(self) -> None:
        super().setup_method()
        self.mask_t = SegMask.from_array(2, 3, [0.9, 0.1, 0.1, 0.1, 0.1, 0.8])
        self.mask_r = SegMask.from_array(2, 3, [0.1, 0.9, 0.1, 0.1, 0.1, 0.1])
        self.gt = [BBox(2, 1, 3, 2)]
        self.pred = [BBox(0, 0, 1, 2)]

    def test_target_map_comes_from_mask(self) -> None:
        for setting in Setting:
            m_t, _ = generate_wam_maps(
                setting, 2, 3, gt_boxes_r=self.gt, pred_boxes_r=self.pred, mask_t=self.mask_t, mask_r=self.mask_r
            )
            assert list(m_t.foreground()) == [0, 5]

    def test_reference_map_per_setting(self) -> None:
        kw = dict(gt_boxes_r=self.gt, pred_boxes_r=self.pred, mask_t=self.mask_t, mask_r=self.mask_r)
        _, gt = generate_wam_maps(Setting.GTBoxR, 2, 3, **kw)  # type: ignore
        _, pre = generate_wam_maps("PreBoxR", 2, 3, **kw)  # type: ignore
        _, no = generate_wam_maps(Setting.NoBoxR, 2, 3, **kw)  # type: ignore
        assert list(gt.foreground()) == [5]
        assert list(pre.foreground()) == [0, 3]
        assert list(no.foreground()) == [1]
        assert gt.values.max() == 2.0

    def test_missing_inputs(self) -> None:
        with pytest.raises(MissingInputException, match="GTBoxR requires ground-truth reference boxes"):
            generate_wam_maps(Setting.GTBoxR, 2, 3, mask_t=self.mask_t)
        with pytest.raises(MissingInputException, match="PreBoxR requires predicted reference boxes"):
            generate_wam_maps(Setting.PreBoxR, 2, 3, gt_boxes_r=self.gt, mask_t=self.mask_t)
        with pytest.raises(MissingInputException, match="a reference decoder mask"):
            generate_wam_maps(Setting.NoBoxR, 2, 3, mask_t=self.mask_t)
        with pytest.raises(MissingInputException, match="a target decoder mask") as e_info:
            generate_wam_maps(Setting.GTBoxR, 2, 3, gt_boxes_r=self.gt)
        assert e_info.value.setting == Setting.GTBoxR


class TestWSAMMaps(TestBase):
    def test_identity_with_boxes(self) -> None:
        boxes = [BBox(1, 1, 3, 3)]
        m_t, m_r = generate_wsam_maps(Setting.GTBoxR, 4, 4, Homography.identity(), boxes_r=boxes)
        np.testing.assert_allclose(m_t.values, m_r.values, atol=1e-12)
        assert list(m_r.foreground()) == [5, 6, 9, 10]

    def test_one_cell_translation(self) -> None:
        boxes = [BBox(0, 0, 2, 4)]
        m_t, m_r = generate_wsam_maps(Setting.PreBoxR, 4, 4, Homography.translation(1.0, 0.0), boxes_r=boxes)
        expected = np.ones((4, 4))
        expected[:, 1:] = m_r.as_grid()[:, :-1]
        np.testing.assert_allclose(m_t.as_grid(), expected, atol=1e-12)
        assert list(m_t.foreground()) == [1, 2, 5, 6, 9, 10, 13, 14]

    def test_no_boxes_zero_masks(self) -> None:
        zeros = SegMask.zeros(3, 3)
        m_t, m_r = generate_wsam_maps(Setting.NoBoxR, 3, 3, Homography.identity(), mask_t=zeros, mask_r=zeros)
        np.testing.assert_allclose(m_t.values, 2.0, atol=1e-12)
        np.testing.assert_allclose(m_r.values, 2.0, atol=1e-12)

    def test_no_boxes_refinement_reads_unrefined_maps(self) -> None:
        mask_t = SegMask.from_array(1, 3, [1.0, 0.0, 0.0])
        mask_r = SegMask.from_array(1, 3, [1.0, 0.0, 0.0])
        m_t, m_r = generate_wsam_maps(
            Setting.NoBoxR, 1, 3, Homography.translation(1.0, 0.0), mask_t=mask_t, mask_r=mask_r
        )
        # t1 = t0 + shift_right(r0) with 0 fill; r1 = r0 + shift_left(t0) with 0 fill
        np.testing.assert_allclose(m_t.values, [2.0 + 0.0, 1.0 + 2.0, 1.0 + 1.0], atol=1e-12)
        np.testing.assert_allclose(m_r.values, [2.0 + 1.0, 1.0 + 1.0, 1.0 + 0.0], atol=1e-12)

    def test_missing_inputs(self) -> None:
        with pytest.raises(MissingInputException, match="reference boxes"):
            generate_wsam_maps(Setting.GTBoxR, 2, 2, Homography.identity())
        with pytest.raises(MissingInputException, match="a reference decoder mask"):
            generate_wsam_maps(Setting.NoBoxR, 2, 2, Homography.identity(), mask_t=SegMask.zeros(2, 2))


class TestBoxFilterMaps(TestBase):
    def test_box_filter_maps(self) -> None:
        wsam_m_r = WeightMap(2, 2, [1.0, 1.7, 1.0, 3.0])
        m_hat_t, m_hat_r = box_filter_maps([BBox(0, 0, 1, 2)], wsam_m_r, beta=0.5)
        np.testing.assert_array_equal(m_hat_t.values, [1.5, 1.0, 1.5, 1.0])
        np.testing.assert_array_equal(m_hat_r.values, [1.0, 1.5, 1.0, 1.5])

    def test_no_predictions(self) -> None:
        m_hat_t, _ = box_filter_maps([], WeightMap.uniform(2, 2))
        assert m_hat_t.is_uniform()
        with pytest.raises(ValueError):
            box_filter_maps([], WeightMap.uniform(2, 2), beta=-0.5)
