from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from mdetpy.elements import ReportFormat
from mdetpy.exceptions import ShapeMismatchException
from mdetpy.exceptions import UnsupportedException
from mdetpy.numerics import Parameters
from mdetpy.numerics import Tape
from mdetpy.numerics import ops

from ..test_base import TestBase


class TestParameters(TestBase):
    def setup_method(self) -> None:
        super().setup_method()
        self.params = Parameters(
            {
                "backbone.w": self.rng.standard_normal((3, 2)),
                "backbone.b": np.zeros((1, 2)),
                "det.w": self.rng.standard_normal((2, 1)),
            }
        )

    def test_mapping(self) -> None:
        p = self.params
        assert len(p) == 3
        assert list(p) == ["backbone.w", "backbone.b", "det.w"]
        assert p.num_values == 10
        assert p.names("backbone") == ["backbone.w", "backbone.b"]
        assert "det.w" in p
        assert repr(p) == "Parameters(3 arrays, 10 values)"
        with pytest.raises(ValueError):
            p["det.w"][0, 0] = 1.0

    def test_unique_names(self) -> None:
        with pytest.raises(KeyError, match="not unique"):
            self.params.add(" det.w ", np.zeros((2, 1)))

    def test_copy_is_deep(self) -> None:
        c = self.params.copy()
        c.apply_sgd({"det.w": np.ones((2, 1))}, lr=1.0)
        assert not np.array_equal(c["det.w"], self.params["det.w"])

    def test_bind(self) -> None:
        constants = self.params.bind()
        assert not any(m.is_tracked for m in constants.values())
        tape = Tape()
        bound = self.params.bind(tape)
        assert all(m.tape is tape for m in bound.values())
        assert tape.name_of(bound["det.w"]) == "det.w"

        loss = ops.sum_all(ops.matmul(bound["backbone.w"], bound["det.w"]))
        grads = Parameters.collect(tape.backward(loss), bound)
        assert list(grads) == list(self.params)
        np.testing.assert_array_equal(grads["backbone.b"], np.zeros((1, 2)))
        np.testing.assert_allclose(grads["det.w"], self.params["backbone.w"].sum(axis=0)[:, None])

    def test_sgd_plain(self) -> None:
        before = self.params["det.w"].copy()
        g = self.rng.standard_normal((2, 1))
        norm = self.params.apply_sgd({"det.w": g}, lr=0.1)
        assert norm == pytest.approx(np.linalg.norm(g))
        np.testing.assert_allclose(self.params["det.w"], before - 0.1 * g)

    def test_sgd_momentum_and_decay(self) -> None:
        w0 = self.params["det.w"].copy()
        g = np.ones((2, 1))
        self.params.apply_sgd({"det.w": g}, lr=0.1, momentum=0.9, weight_decay=0.01)
        v1 = g + 0.01 * w0
        w1 = w0 - 0.1 * v1
        np.testing.assert_allclose(self.params["det.w"], w1)
        self.params.apply_sgd({"det.w": g}, lr=0.1, momentum=0.9, weight_decay=0.01)
        v2 = 0.9 * v1 + g + 0.01 * w1
        np.testing.assert_allclose(self.params["det.w"], w1 - 0.1 * v2)

    def test_sgd_clipping(self) -> None:
        before = self.params["det.w"].copy()
        g = np.array([[3.0], [4.0]])
        norm = self.params.apply_sgd({"det.w": g}, lr=1.0, clip=1.0)
        assert norm == pytest.approx(5.0)
        np.testing.assert_allclose(self.params["det.w"], before - g / 5.0)

    def test_sgd_shape_mismatch(self) -> None:
        with pytest.raises(ShapeMismatchException, match="apply_sgd"):
            self.params.apply_sgd({"det.w": np.ones((1, 2))}, lr=0.1)

    @pytest.mark.parametrize("fmt", [ReportFormat.JSON, "csv"])
    def test_save_load(self, tmp_path: Path, fmt: ReportFormat | str) -> None:
        path = self.params.save(tmp_path / "params.out", fmt)
        loaded = Parameters.load(path)
        assert list(loaded) == list(self.params)
        for name in self.params:
            np.testing.assert_array_equal(loaded[name], self.params[name])

    def test_bad_checkpoint(self) -> None:
        with pytest.raises(UnsupportedException, match="Not an mdetpy parameter checkpoint"):
            Parameters.from_dict({"format": "other", "params": []})
