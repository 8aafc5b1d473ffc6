from __future__ import annotations

import numpy as np
import pytest

from mdetpy.numerics import Matrix
from mdetpy.numerics import check_gradients
from mdetpy.numerics import finite_diff_grad
from mdetpy.numerics import ops
from mdetpy.numerics import relative_error

from ..test_base import TestBase


class TestGradcheck(TestBase):
    def test_finite_diff_grad(self) -> None:
        x = self.rng.standard_normal((2, 3))
        g = finite_diff_grad(lambda a: float(np.sum(a**3)), x)
        np.testing.assert_allclose(g, 3.0 * x**2, rtol=1e-6, atol=1e-8)
        # the input is left untouched
        assert g.shape == x.shape

        with pytest.raises(ValueError, match="step must be > 0"):
            finite_diff_grad(lambda a: 0.0, x, h=0.0)

    def test_relative_error(self) -> None:
        a = np.array([1.0, 0.0])
        assert relative_error(a, a) == 0.0
        assert relative_error(a, np.array([0.0, 1.0])) == pytest.approx(np.sqrt(2.0))
        # near-zero gradients are compared on the absolute floor
        assert relative_error(np.array([1e-9]), np.array([0.0])) == pytest.approx(1e-6)
        assert relative_error(np.array([5e-4]), np.array([5e-4 + 5e-9])) == pytest.approx(5e-6)
        # above the floor the comparison is relative
        assert relative_error(np.array([2.0]), np.array([2.0 + 2e-6])) == pytest.approx(1e-6, rel=1e-4)

    def test_check_gradients_passes(self) -> None:
        inputs = {"a": self.rng.standard_normal((3, 2)), "b": self.rng.standard_normal((2, 2))}
        err = check_gradients(lambda m: ops.sum_all(ops.exp(ops.matmul(m["a"], m["b"]))), inputs)
        assert err < 1e-6

    def test_check_gradients_detects_broken_gradient(self) -> None:
        inputs = {"x": self.rng.uniform(1.0, 2.0, size=(2, 2))}

        def build(m: dict[str, Matrix]) -> Matrix:
            # detaching one factor hides half of the true derivative of x^2 from the tape
            return ops.sum_all(ops.multiply(m["x"], m["x"].detach()))

        assert check_gradients(build, inputs) > 0.1
