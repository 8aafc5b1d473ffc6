from __future__ import annotations

from typing import Dict

import numpy as np
import pytest

from mdetpy.attention import BlockParams
from mdetpy.attention import init_block_params
from mdetpy.attention import transformer_block
from mdetpy.elements import AttentionMode
from mdetpy.elements import FeatureGrid
from mdetpy.exceptions import ShapeMismatchException
from mdetpy.numerics import Matrix
from mdetpy.numerics import Parameters
from mdetpy.numerics import ops

from ..test_base import TestBase

SHAPES = {
    "wq": (8, 8),
    "wk": (8, 8),
    "wv": (8, 8),
    "wo": (8, 8),
    "w1": (8, 32),
    "b1": (1, 32),
    "w2": (32, 8),
    "b2": (1, 8),
    "ln1_g": (1, 8),
    "ln1_b": (1, 8),
    "ln2_g": (1, 8),
    "ln2_b": (1, 8),
}


class TestTransformerBlock(TestBase):
    def _random_params(self, with_embeddings: bool = False) -> Dict[str, np.ndarray]:
        arrays = {name: 0.3 * self.rng.standard_normal(shape) for name, shape in SHAPES.items()}
        arrays["ln1_g"] += 1.0
        arrays["ln2_g"] += 1.0
        if with_embeddings:
            arrays["w_e"] = 0.3 * self.rng.standard_normal((3, 8))
        return arrays

    def test_init_block_params(self) -> None:
        params = Parameters()
        init_block_params(params, "blk", 8, self.rng, num_classes=3)
        assert params.names("blk") == [f"blk.{n}" for n in SHAPES] + ["blk.w_e"]
        for name, shape in SHAPES.items():
            assert params[f"blk.{name}"].shape == shape
        wq = params["blk.wq"] / 0.1
        np.testing.assert_allclose(wq.T @ wq, np.eye(8), atol=1e-12)
        assert not params["blk.wo"].any() and not params["blk.w2"].any()

        bp = BlockParams.from_bound(params.bind(), "blk")
        assert bp.channels == 8
        assert bp.w_e is not None and bp.w_e.shape == (3, 8)

    @pytest.mark.parametrize("mode", list(AttentionMode))
    def test_fresh_block_is_identity(self, mode: AttentionMode) -> None:
        params = Parameters()
        init_block_params(params, "blk", 8, self.rng, num_classes=2)
        bp = BlockParams.from_bound(params.bind(), "blk")
        x = self.random_grid(3, 3, 8)
        ctx = self.random_grid(2, 2, 8)
        maps = (self.random_map(3, 3), self.random_map(2, 2))
        out = transformer_block(x, bp, mode, context=ctx, maps=maps)
        assert out.shape == x.shape
        np.testing.assert_array_equal(out.values.data, x.values.data)

    def test_self_mode_ignores_context(self) -> None:
        bp = BlockParams(**{n: Matrix(v) for n, v in self._random_params().items()})
        x = self.random_grid(2, 3, 8)
        a = transformer_block(x, bp, "self")
        b = transformer_block(x, bp, AttentionMode.Self, context=self.random_grid(2, 3, 8))
        np.testing.assert_array_equal(a.values.data, b.values.data)
        assert not np.allclose(a.values.data, x.values.data)

    def test_uniform_maps_reduce_to_cross(self) -> None:
        bp = BlockParams(**{n: Matrix(v) for n, v in self._random_params().items()})
        x, ctx = self.random_grid(2, 2, 8), self.random_grid(3, 2, 8)
        cross = transformer_block(x, bp, AttentionMode.Cross, context=ctx)
        weighted = transformer_block(x, bp, AttentionMode.Weighted, context=ctx)
        np.testing.assert_allclose(weighted.values.data, cross.values.data, atol=1e-12)

    def test_failures(self) -> None:
        arrays = self._random_params()
        arrays["w1"] = np.zeros((8, 16))
        with pytest.raises(ShapeMismatchException, match="BlockParams.w1"):
            BlockParams(**{n: Matrix(v) for n, v in arrays.items()})

        bp = BlockParams(**{n: Matrix(v) for n, v in self._random_params().items()})
        with pytest.raises(ShapeMismatchException, match="transformer_block"):
            transformer_block(self.random_grid(2, 2, 4), bp, AttentionMode.Self)
        with pytest.raises(ValueError, match="needs a context grid"):
            transformer_block(self.random_grid(2, 2, 8), bp, AttentionMode.Cross)
        with pytest.raises(ShapeMismatchException):
            x = self.random_grid(2, 2, 8)
            transformer_block(x, bp, "weighted", context=x, maps=(self.random_map(2, 2), self.random_map(3, 3)))

    @pytest.mark.parametrize("mode", list(AttentionMode))
    def test_gradients(self, mode: AttentionMode) -> None:
        arrays = self._random_params(with_embeddings=mode == AttentionMode.WeightedSpatial)
        checked = ("wq", "wk", "wv", "wo", "w1", "b2", "ln1_g", "ln2_b")
        fixed = {n: Matrix(v) for n, v in arrays.items() if n not in checked}
        maps = (self.random_map(2, 2), self.random_map(2, 2))
        direction = self.rng.standard_normal((4, 8))
        inputs = {"x": self.rng.standard_normal((4, 8)), "ctx": self.rng.standard_normal((4, 8))}
        inputs.update({n: arrays[n] for n in checked})

        def build(m: Dict[str, Matrix]) -> Matrix:
            bp = BlockParams(**fixed, **{n: m[n] for n in checked})
            ctx = FeatureGrid(2, 2, m["ctx"])
            x = FeatureGrid(2, 2, m["x"])
            out = transformer_block(x, bp, mode, context=ctx, maps=maps)
            return ops.sum_all(ops.multiply(out.values, Matrix(direction)))

        self.assert_gradients(build, inputs)
