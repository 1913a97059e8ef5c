"""Uniform angular grids with second-order difference and quadrature operators.

Two domains are supported:

* ``n=1``: the unit circle, nodes ``theta_i = 2*pi*i/N`` with periodic
  wraparound and equal trapezoid weights ``2*pi/N``.
* ``n=2``: the polar-angle interval ``[0, pi]`` for axisymmetric profiles,
  nodes ``theta_i = pi*i/(N-1)`` including both poles.  Derivatives close
  the poles by even reflection (valid for smooth axisymmetric data, where
  ``g'(0) = g'(pi) = 0``); quadrature is the trapezoid rule weighted by
  ``2*pi*sin(theta)`` so that the weights sum to ``|S^2| = 4*pi + O(h^2)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SphericalGrid",
    "circle_grid",
    "polar_grid",
    "deriv1",
    "deriv2",
    "integrate",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SphericalGrid:
    """Uniform grid on S^1 (periodic) or on [0, pi] (axisymmetric S^2).

    Attributes
    ----------
    n : dimension of the sphere (1 or 2)
    nodes : strictly increasing angles, uniform spacing ``h``
    weights : quadrature weight per node; ``sum(weights)`` is ``2*pi``
        exactly for n=1 and ``4*pi`` within O(h^2) for n=2
    h : node spacing
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    h: float

    def __post_init__(self):
        if self.n not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.n}")
        if self.nodes.size < 16:
            raise ValueError(f"need at least 16 nodes, got {self.nodes.size}")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def sphere_area(self) -> float:
        """|S^n|: 2*pi for n=1, 4*pi for n=2."""
        return TWO_PI if self.n == 1 else 2.0 * TWO_PI

    def check_size(self, g: np.ndarray) -> None:
        if g.shape != self.nodes.shape:
            raise ValueError(f"expected {self.nodes.shape} values, got {g.shape}")


def circle_grid(N: int) -> SphericalGrid:
    """Periodic grid on [0, 2*pi) with N nodes and exact trapezoid weights."""
    h = TWO_PI / N
    nodes = h * np.arange(N)
    weights = np.full(N, h)
    return SphericalGrid(n=1, nodes=nodes, weights=weights, h=h)


def polar_grid(N: int) -> SphericalGrid:
    """Polar-angle grid on [0, pi] with N nodes; endpoints are the poles."""
    h = np.pi / (N - 1)
    nodes = h * np.arange(N)
    weights = TWO_PI * h * np.sin(nodes)
    weights = weights.copy()
    weights[0] *= 0.5  # trapezoid half-weights; zero anyway since sin(0)=0
    weights[-1] *= 0.5
    return SphericalGrid(n=2, nodes=nodes, weights=weights, h=h)


def deriv1(g: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    """Second-order centered first derivative.

    n=1 wraps periodically; n=2 reflects evenly across each pole, which
    makes the derivative vanish exactly at the poles.
    """
    grid.check_size(g)
    h = grid.h
    if grid.n == 1:
        return (np.roll(g, -1) - np.roll(g, 1)) / (2.0 * h)
    d = np.empty_like(g)
    d[1:-1] = (g[2:] - g[:-2]) / (2.0 * h)
    d[0] = 0.0
    d[-1] = 0.0
    return d


def deriv2(g: np.ndarray, grid: SphericalGrid) -> np.ndarray:
    """Second-order centered second derivative (same boundary closure as deriv1)."""
    grid.check_size(g)
    h2 = grid.h * grid.h
    if grid.n == 1:
        return (np.roll(g, -1) - 2.0 * g + np.roll(g, 1)) / h2
    d = np.empty_like(g)
    d[1:-1] = (g[2:] - 2.0 * g[1:-1] + g[:-2]) / h2
    d[0] = 2.0 * (g[1] - g[0]) / h2
    d[-1] = 2.0 * (g[-2] - g[-1]) / h2
    return d


def integrate(g: np.ndarray, grid: SphericalGrid) -> float:
    """Quadrature sum(w_i * g_i) approximating the integral over S^n."""
    grid.check_size(g)
    return float(grid.weights @ g)
