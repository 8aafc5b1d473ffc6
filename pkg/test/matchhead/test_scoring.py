from __future__ import annotations

import numpy as np
import pytest

from mdetpy.elements import FeatureGrid
from mdetpy.elements import WeightMap
from mdetpy.exceptions import ShapeMismatchException
from mdetpy.matchhead import ScoreMatrix
from mdetpy.matchhead import apply_box_filter
from mdetpy.matchhead import dual_softmax
from mdetpy.matchhead import mnn_select
from mdetpy.matchhead import score_matrix
from mdetpy.numerics import Matrix
from mdetpy.numerics import ops

from ..test_base import TestBase


class TestScoreMatrix(TestBase):
    def test_cosine_over_tau(self) -> None:
        c_t, c_r = self.random_grid(2, 2, 3), self.random_grid(2, 3, 3)
        s = score_matrix(c_t, c_r, tau=0.5)
        assert s.shape == (4, 6)
        assert s.tau == 0.5
        t = c_t.values.data / np.linalg.norm(c_t.values.data, axis=1, keepdims=True)
        r = c_r.values.data / np.linalg.norm(c_r.values.data, axis=1, keepdims=True)
        np.testing.assert_allclose(s.s.data, t @ r.T / 0.5, atol=1e-12)
        assert np.all(np.abs(s.s.data) <= 2.0 + 1e-12)

    def test_failures(self) -> None:
        c = self.random_grid(2, 2, 3)
        with pytest.raises(ValueError, match="temperature must be > 0"):
            score_matrix(c, c, tau=0.0)
        with pytest.raises(ValueError, match="temperature must be > 0"):
            ScoreMatrix(Matrix.zeros(1, 1), -1.0)
        with pytest.raises(ShapeMismatchException, match="score_matrix"):
            score_matrix(c, self.random_grid(2, 2, 4))


class TestDualSoftmax(TestBase):
    def test_bounded_by_both_marginals(self) -> None:
        for _ in range(1000):
            n, m = self.rng.integers(1, 7, size=2)
            s = Matrix(self.rng.standard_normal((n, m)) * self.rng.uniform(0.1, 20.0))
            p = dual_softmax(s).data
            assert np.all(p >= 0.0)
            assert np.all(p <= ops.softmax_rows(s).data + 1e-15)
            assert np.all(p <= ops.softmax_cols(s).data + 1e-15)

    def test_sharp_diagonal(self) -> None:
        p = dual_softmax(Matrix(np.diag([100.0, 100.0])))
        np.testing.assert_allclose(p.data, np.eye(2), atol=1e-12)

    def test_rows_need_not_sum_to_one(self) -> None:
        p = dual_softmax(Matrix([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])).data
        assert not np.allclose(p.sum(axis=1), 1.0)

    def test_accepts_score_matrix(self) -> None:
        c_t, c_r = self.random_grid(2, 2, 3), self.random_grid(2, 2, 3)
        s = score_matrix(c_t, c_r)
        np.testing.assert_array_equal(dual_softmax(s).data, dual_softmax(s.s).data)


class TestBoxFilter(TestBase):
    def test_filter_is_outer_product(self) -> None:
        p = Matrix(self.rng.uniform(size=(4, 6)))
        m_t, m_r = self.random_map(2, 2), self.random_map(2, 3)
        out = apply_box_filter(p, m_t, m_r)
        np.testing.assert_allclose(out.data, p.data * np.outer(m_t.values, m_r.values), atol=1e-12)

    def test_uniform_maps_keep_mnn_pairs(self) -> None:
        for _ in range(1000):
            n, m = self.rng.integers(1, 7, size=2)
            p = dual_softmax(Matrix(self.rng.standard_normal((n, m)) * 5.0))
            value = float(self.rng.uniform(1.0, 3.0))
            filtered = apply_box_filter(p, WeightMap.uniform(int(n), 1, value), WeightMap.uniform(int(m), 1, value))
            assert mnn_select(filtered, 0.0).indices == mnn_select(p, 0.0).indices

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ShapeMismatchException, match="apply_box_filter"):
            apply_box_filter(Matrix.ones(4, 4), WeightMap.uniform(2, 2), WeightMap.uniform(3, 1))

    def test_foreground_mnn_pairs_survive(self) -> None:
        for _ in range(500):
            n, m = (int(v) for v in self.rng.integers(2, 8, size=2))
            p = dual_softmax(Matrix(self.rng.standard_normal((n, m)) * self.rng.uniform(0.5, 10.0)))
            fg_t = self.rng.uniform(size=n) < 0.5
            fg_r = self.rng.uniform(size=m) < 0.5
            beta = float(self.rng.uniform(0.1, 3.0))
            m_t = WeightMap(n, 1, np.where(fg_t, 1.0 + beta, 1.0))
            m_r = WeightMap(m, 1, np.where(fg_r, 1.0 + beta, 1.0))
            kept = set(mnn_select(apply_box_filter(p, m_t, m_r), 0.0).indices)
            for i, j in mnn_select(p, 0.0).indices:
                if fg_t[i] and fg_r[j]:
                    assert (i, j) in kept
