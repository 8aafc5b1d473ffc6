from __future__ import annotations

import numpy as np
import pytest

from mdetpy.exceptions import ShapeMismatchException
from mdetpy.minidet import DetPredictions
from mdetpy.minidet import det_head
from mdetpy.minidet import init_det_params
from mdetpy.numerics import Matrix
from mdetpy.numerics import Parameters
from mdetpy.numerics import Tape

from ..test_base import TestBase


class TestDetHead(TestBase):
    def setup_method(self) -> None:
        super().setup_method()
        self.params = Parameters()
        init_det_params(self.params, 6, 3, self.rng)

    def test_params(self) -> None:
        assert self.params.names() == ["det.cls_w", "det.cls_b", "det.obj_w", "det.obj_b", "det.reg_w", "det.reg_b"]
        assert self.params["det.cls_w"].shape == (6, 3)
        assert self.params["det.reg_w"].shape == (6, 4)

    def test_outputs(self) -> None:
        grid = self.random_grid(3, 4, 6)
        preds = det_head(grid, self.params.bind(), stride=2.0)
        assert preds.hw == 12
        assert preds.num_classes == 3
        assert preds.stride == 2.0
        assert preds.cls_logits.shape == (12, 3)
        assert preds.obj_logits.shape == (12, 1)
        assert preds.reg_logits.shape == (12, 4)
        np.testing.assert_allclose(preds.class_probs().data.sum(axis=1), 1.0)
        assert np.all(preds.offsets().data > 0.0)
        o = preds.objectness().data
        assert np.all((o > 0.0) & (o < 1.0))
        expected = grid.values.data @ self.params["det.cls_w"] + self.params["det.cls_b"]
        np.testing.assert_allclose(preds.cls_logits.data, expected, atol=1e-12)

    def test_detach(self) -> None:
        tape = Tape()
        preds = det_head(self.random_grid(2, 2, 6), self.params.bind(tape))
        assert preds.cls_logits.is_tracked
        d = preds.detach()
        assert not any(m.is_tracked for m in (d.cls_logits, d.obj_logits, d.reg_logits))

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ShapeMismatchException, match="DetPredictions"):
            DetPredictions(2, 2, 1.0, Matrix.zeros(4, 3), Matrix.zeros(4, 1), Matrix.zeros(4, 3))
        with pytest.raises(ShapeMismatchException, match="DetPredictions"):
            DetPredictions(2, 2, 1.0, Matrix.zeros(3, 3), Matrix.zeros(4, 1), Matrix.zeros(4, 4))
