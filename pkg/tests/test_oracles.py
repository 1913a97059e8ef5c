"""Tests for the brute-force validators (these vouch for everything else)."""

import numpy as np
import pytest

from gcflow.oracles import (
    ParametricCurve,
    parametric_curvature_oracle,
    polygon_integral_gauss_curvature,
    random_convex_polygon,
    reference_quadrature,
    smoothed_polygon_support,
)


def circle_curve(radius, m=10_000, center=(0.0, 0.0)):
    s = np.linspace(0, 2 * np.pi, m, endpoint=False)
    return ParametricCurve(np.column_stack([center[0] + radius * np.cos(s),
                                            center[1] + radius * np.sin(s)]))


def ellipse_curve(a, b, m=10_000):
    s = np.linspace(0, 2 * np.pi, m, endpoint=False)
    return ParametricCurve(np.column_stack([a * np.cos(s), b * np.sin(s)]))


class TestCurvatureOracle:
    def test_circle(self):
        kappa = parametric_curvature_oracle(circle_curve(2.0))
        assert np.max(np.abs(kappa - 0.5)) < 1e-6

    def test_ellipse_closed_form(self):
        a, b, m = 2.0, 1.0, 10_000
        s = np.linspace(0, 2 * np.pi, m, endpoint=False)
        kappa = parametric_curvature_oracle(ellipse_curve(a, b, m))
        exact = a * b / (a * a * np.sin(s) ** 2 + b * b * np.cos(s) ** 2) ** 1.5
        assert np.max(np.abs(kappa - exact)) < 1e-5

    def test_square_total_turning(self):
        square = ParametricCurve(np.array([[1.0, -1.0], [1.0, 1.0],
                                           [-1.0, 1.0], [-1.0, -1.0]]) )
        total = polygon_integral_gauss_curvature(square, (0.0, 2 * np.pi))
        assert total == pytest.approx(2 * np.pi, abs=1e-12)

    def test_nonconvex_rejected(self):
        pts = np.array([[1.0, 0.0], [0.1, 0.1], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        with pytest.raises(ValueError):
            ParametricCurve(pts)


class TestIntegralGaussCurvature:
    def test_full_circle_any_polygon(self):
        poly = random_convex_polygon(17, seed=3)
        total = polygon_integral_gauss_curvature(poly, (0.0, 2 * np.pi))
        assert total == pytest.approx(2 * np.pi, abs=1e-12)

    def test_square_quadrant(self):
        # quadrant centered on one vertex direction captures exactly one corner
        square = ParametricCurve(np.array([[1.0, -1.0], [1.0, 1.0],
                                           [-1.0, 1.0], [-1.0, -1.0]]))
        got = polygon_integral_gauss_curvature(square, (0.0, np.pi / 2))
        assert got == pytest.approx(np.pi / 2, abs=1e-12)

    def test_window_additivity(self):
        poly = random_convex_polygon(31, seed=11)
        a = polygon_integral_gauss_curvature(poly, (0.0, np.pi))
        b = polygon_integral_gauss_curvature(poly, (np.pi, 2 * np.pi))
        assert a + b == pytest.approx(2 * np.pi, abs=1e-12)


class TestReferenceQuadrature:
    def test_constant_circle(self):
        got = reference_quadrature(lambda t: np.ones_like(t), 1)
        assert got == pytest.approx(2 * np.pi, abs=1e-12)

    def test_sin_interval(self):
        got = reference_quadrature(np.sin, 2)
        assert got == pytest.approx(2.0, abs=1e-12)

    def test_ellipse_log_radius(self):
        # the log-integral of the a=2, b=1 ellipse support function; the
        # closed form of the mean of log sqrt(a^2 cos^2 + b^2 sin^2) is
        # log((a+b)/2)
        got = reference_quadrature(
            lambda t: np.log(np.sqrt(4 * np.cos(t) ** 2 + np.sin(t) ** 2)), 1)
        assert got == pytest.approx(2 * np.pi * np.log(1.5), rel=1e-12)


class TestSmoothing:
    def test_smoothed_polygon_is_convex_samples(self):
        poly = random_convex_polygon(50, seed=7)
        N = 512
        angles = 2 * np.pi * np.arange(N) / N
        u = smoothed_polygon_support(poly, angles, sigma=0.05)
        h = 2 * np.pi / N
        b = (np.roll(u, -1) - 2 * u + np.roll(u, 1)) / h**2 + u
        assert np.min(u) > 0
        assert np.min(b) > 0
