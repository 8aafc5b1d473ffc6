from __future__ import annotations

import numpy as np
import pytest

from mdetpy.elements import FeatureGrid
from mdetpy.elements import WeightMap
from mdetpy.geometry import Homography
from mdetpy.geometry import cell_centers
from mdetpy.geometry import cell_homography
from mdetpy.geometry import warp_grid
from mdetpy.numerics import Tape

from ..test_base import TestBase


class TestWarping(TestBase):
    def test_cell_centers(self) -> None:
        c = cell_centers(2, 3)
        assert c.shape == (6, 2)
        np.testing.assert_array_equal(c[0], [0.5, 0.5])
        np.testing.assert_array_equal(c[4], [1.5, 1.5])
        np.testing.assert_array_equal(cell_centers(2, 3, 4.0)[5], [10.0, 6.0])

    def test_cell_homography(self) -> None:
        h = cell_homography(Homography.translation(8.0, 4.0), 4.0)
        assert h.is_close(Homography.translation(2.0, 1.0))
        with pytest.raises(ValueError, match="stride"):
            cell_homography(Homography.identity(), 0.5)

    def test_identity_warp(self) -> None:
        g = self.random_grid(4, 5, 3)
        out = warp_grid(g, Homography.identity())
        np.testing.assert_allclose(out.numpy(), g.numpy(), atol=1e-12)

    def test_translation_warp(self) -> None:
        arr = self.rng.standard_normal((3, 4, 2))
        out = warp_grid(FeatureGrid.from_array(arr), Homography.translation(1.0, 0.0)).numpy()
        np.testing.assert_allclose(out[:, 1:], arr[:, :-1], atol=1e-12)
        np.testing.assert_array_equal(out[:, 0], 0.0)

    def test_translation_warp_with_stride(self) -> None:
        arr = self.rng.standard_normal((3, 4, 2))
        out = warp_grid(FeatureGrid.from_array(arr), Homography.translation(0.0, 8.0), stride=8.0, fill=-1.0)
        np.testing.assert_allclose(out.numpy()[1:], arr[:-1], atol=1e-12)
        np.testing.assert_array_equal(out.numpy()[0], -1.0)

    def test_weight_map_fill(self) -> None:
        m = WeightMap(2, 3, [2.0, 3.0, 4.0, 5.0, 6.0, 7.0])
        out = warp_grid(m, Homography.translation(1.0, 0.0))
        assert isinstance(out, WeightMap)
        np.testing.assert_allclose(out.as_grid(), [[1.0, 2.0, 3.0], [1.0, 5.0, 6.0]], atol=1e-12)

    def test_bilinear(self) -> None:
        arr = np.arange(4.0).reshape(1, 4, 1)
        out = warp_grid(FeatureGrid.from_array(arr), Homography.translation(0.5, 0.0)).numpy()
        np.testing.assert_allclose(out[0, 1:, 0], [0.5, 1.5, 2.5], atol=1e-12)
        assert out[0, 0, 0] == 0.0

    def test_tracked_values_are_resampled_as_constants(self) -> None:
        tape = Tape()
        g = FeatureGrid(2, 2, tape.leaf(self.rng.standard_normal((4, 2))))
        assert not warp_grid(g, Homography.identity()).values.is_tracked
