"""Finite-grid samplers for the limiting Gaussian objects.

Brownian motion B, the standard Brownian bridge Pi(s) = B(s) - s*B(1), the
super-critical limit process Pi(rho(c))/(1 - pi(c)) and the barely
super-critical limit B(2t)/t.  Everything is sampled exactly on the grid
(Gaussian increments), so finite-dimensional laws are exact and only the
caller-provided generator carries state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import rho

__all__ = [
    "GridPath",
    "sample_brownian",
    "sample_bridge",
    "sample_supercrit_limit",
    "sample_supercrit_limit_alt",
    "sample_bsc_limit",
    "MAX_GRID",
]

MAX_GRID = 10_000


@dataclass(frozen=True)
class GridPath:
    """A path observed on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if np.any(np.diff(grid) <= 0.0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


def _check_grid(grid: np.ndarray, what: str) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError(f"{what} grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError(f"{what} grid must be strictly increasing")
    if grid.size > MAX_GRID:
        raise ValueError(f"{what} grid exceeds {MAX_GRID} points")
    return grid


def _brownian_values(points: np.ndarray, rng) -> np.ndarray:
    # Gaussian increments over the spacings; B(0) = 0 pins the first value
    # when the grid starts at 0.
    dt = np.diff(points, prepend=0.0)
    return np.cumsum(np.sqrt(dt) * rng.standard_normal(points.size))


def sample_brownian(grid, rng) -> GridPath:
    """Standard Brownian motion on a grid with grid[0] >= 0."""
    grid = _check_grid(grid, "Brownian")
    if grid[0] < 0.0:
        raise ValueError("Brownian grid must start at a non-negative time")
    return GridPath(grid, _brownian_values(grid, rng))


def sample_bridge(grid, rng) -> GridPath:
    """Standard Brownian bridge Pi(s) = B(s) - s*B(1) on a grid in [0, 1]."""
    grid = _check_grid(grid, "bridge")
    if grid[0] < 0.0 or grid[-1] > 1.0:
        raise ValueError("bridge grid must lie within [0, 1]")
    if grid[-1] < 1.0:
        b = _brownian_values(np.append(grid, 1.0), rng)
        b, b1 = b[:-1], b[-1]
    else:
        b = _brownian_values(grid, rng)
        b1 = b[-1]
    return GridPath(grid, b - grid * b1)


def sample_supercrit_limit(c_grid, rng) -> GridPath:
    """Limit fluctuation process Pi(rho(c))/(1 - pi(c)) on a c-grid > 1."""
    c_grid = _check_grid(c_grid, "c")
    rhos = np.array([rho(float(c)) for c in c_grid])
    pis = c_grid * (1.0 - rhos)
    bridge = sample_bridge(rhos, rng)
    return GridPath(c_grid, bridge.values / (1.0 - pis))


def sample_supercrit_limit_alt(c_grid, rng) -> GridPath:
    """Equal-in-law representation (1-rho)/(1-pi) * B(rho/(1-rho)).

    Same finite-dimensional law as ``sample_supercrit_limit``; kept for
    distributional cross-checks of the two representations.
    """
    c_grid = _check_grid(c_grid, "c")
    rhos = np.array([rho(float(c)) for c in c_grid])
    pis = c_grid * (1.0 - rhos)
    u = rhos / (1.0 - rhos)
    b = _brownian_values(u, rng)
    return GridPath(c_grid, (1.0 - rhos) / (1.0 - pis) * b)


def sample_bsc_limit(t_grid, rng) -> GridPath:
    """Barely super-critical limit B(2t)/t on a positive t-grid."""
    t_grid = _check_grid(t_grid, "t")
    if t_grid[0] <= 0.0:
        raise ValueError("t grid must be strictly positive")
    b = _brownian_values(2.0 * t_grid, rng)
    return GridPath(t_grid, b / t_grid)
