"""Finite-dimensional laws of the Gaussian grid samplers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sbfw import analytic as an
from sbfw import gauss_limits as gl


def _sample_matrix(sampler, grid, rng, n_samples: int) -> np.ndarray:
    return np.stack([sampler(grid, rng).values for _ in range(n_samples)])


def _se_of_mean(x: np.ndarray) -> np.ndarray:
    return x.std(axis=0, ddof=1) / math.sqrt(x.shape[0])


def _cov_and_se(x: np.ndarray, i: int, j: int) -> tuple[float, float]:
    prod = x[:, i] * x[:, j]
    return float(prod.mean()), float(_se_of_mean(prod))


N_SAMPLES = 100_000


class TestBrownian:
    def test_pinned_at_zero_grid(self):
        path = gl.sample_brownian([0.0], np.random.default_rng(0))
        assert path.values[0] == 0.0

    def test_variance_and_covariance(self):
        rng = np.random.default_rng(1)
        x = np.stack(
            [gl.sample_brownian([1.0, 2.0, 3.0], rng).values for _ in range(N_SAMPLES)]
        )
        var2, se = _cov_and_se(x, 1, 1)
        assert abs(var2 - 2.0) <= 3.0 * se
        cov13, se = _cov_and_se(x, 0, 2)
        assert abs(cov13 - 1.0) <= 3.0 * se

    def test_deterministic_given_seed(self):
        a = gl.sample_brownian([0.5, 1.0], np.random.default_rng(7)).values
        b = gl.sample_brownian([0.5, 1.0], np.random.default_rng(7)).values
        assert np.array_equal(a, b)

    def test_grid_validation(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            gl.sample_brownian([1.0, 1.0], rng)
        with pytest.raises(ValueError):
            gl.sample_brownian([-0.5, 1.0], rng)
        with pytest.raises(ValueError):
            gl.sample_brownian(np.linspace(0, 1, gl.MAX_GRID + 2), rng)


class TestBridge:
    def test_pinned_ends(self):
        rng = np.random.default_rng(3)
        assert gl.sample_bridge([0.0], rng).values[0] == 0.0
        assert gl.sample_bridge([1.0], rng).values[0] == pytest.approx(0.0, abs=0.0)
        both = gl.sample_bridge([0.0, 1.0], rng).values
        assert both[0] == 0.0 and both[1] == pytest.approx(0.0, abs=1e-15)

    def test_variance_and_covariance(self):
        rng = np.random.default_rng(4)
        x = _sample_matrix(gl.sample_bridge, [0.3, 0.5, 0.7], rng, N_SAMPLES)
        var, se = _cov_and_se(x, 1, 1)
        assert abs(var - 0.25) <= 3.0 * se
        cov, se = _cov_and_se(x, 0, 2)
        assert abs(cov - 0.09) <= 3.0 * se

    def test_grid_validation(self):
        rng = np.random.default_rng(5)
        with pytest.raises(ValueError):
            gl.sample_bridge([0.5, 1.1], rng)
        with pytest.raises(ValueError):
            gl.sample_bridge([-0.1, 0.5], rng)


class TestSupercritLimit:
    def test_variance_at_c2(self):
        rng = np.random.default_rng(6)
        x = _sample_matrix(gl.sample_supercrit_limit, [2.0], rng, N_SAMPLES)
        var, se = _cov_and_se(x, 0, 0)
        assert abs(var - an.sigma2(2.0)) <= 3.0 * se

    def test_pair_covariance(self):
        rng = np.random.default_rng(7)
        x = _sample_matrix(gl.sample_supercrit_limit, [1.5, 3.0], rng, N_SAMPLES)
        cov, se = _cov_and_se(x, 0, 1)
        assert abs(cov - an.cov_supercrit_limit(1.5, 3.0)) <= 3.0 * se

    def test_alternative_representation_same_law(self):
        # both representations are centered Gaussians; matching covariances
        # on the grid means matching finite-dimensional laws
        rng = np.random.default_rng(8)
        grid = [1.5, 2.0, 3.0]
        x = _sample_matrix(gl.sample_supercrit_limit, grid, rng, N_SAMPLES)
        y = _sample_matrix(gl.sample_supercrit_limit_alt, grid, rng, N_SAMPLES)
        for i in range(3):
            mean_gap = x[:, i].mean() - y[:, i].mean()
            se = math.hypot(float(_se_of_mean(x[:, i])), float(_se_of_mean(y[:, i])))
            assert abs(mean_gap) <= 3.0 * se
            for j in range(i, 3):
                cx, sx = _cov_and_se(x, i, j)
                cy, sy = _cov_and_se(y, i, j)
                assert abs(cx - cy) <= 3.0 * math.hypot(sx, sy)
                assert abs(cx - an.cov_supercrit_limit(grid[i], grid[j])) <= 3.0 * sx

    def test_domain(self):
        rng = np.random.default_rng(9)
        with pytest.raises(ValueError):
            gl.sample_supercrit_limit([0.9, 2.0], rng)


class TestBscLimit:
    def test_variance_at_t1(self):
        rng = np.random.default_rng(10)
        x = _sample_matrix(gl.sample_bsc_limit, [1.0], rng, N_SAMPLES)
        var, se = _cov_and_se(x, 0, 0)
        assert abs(var - 2.0) <= 3.0 * se

    def test_pair_covariance_is_one(self):
        rng = np.random.default_rng(11)
        x = _sample_matrix(gl.sample_bsc_limit, [0.5, 2.0], rng, N_SAMPLES)
        cov, se = _cov_and_se(x, 0, 1)
        assert abs(cov - 1.0) <= 3.0 * se

    def test_variance_decreases_along_grid(self):
        grid = [1.0, 2.0, 4.0, 8.0]
        targets = [an.cov_bsc_limit(t, t) for t in grid]
        assert all(b < a for a, b in zip(targets, targets[1:]))

    def test_domain(self):
        rng = np.random.default_rng(12)
        with pytest.raises(ValueError):
            gl.sample_bsc_limit([0.0, 1.0], rng)


class TestGridPath:
    def test_validation(self):
        with pytest.raises(ValueError):
            gl.GridPath(np.array([1.0, 1.0]), np.array([0.0, 0.0]))
        with pytest.raises(ValueError):
            gl.GridPath(np.array([1.0, 2.0]), np.array([0.0]))
