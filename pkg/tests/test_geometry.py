"""Tests for the support/radial calculus, curvature and polar duality."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcflow.errors import ConvexityLost
from gcflow.geometry import (
    RadialFn,
    SupportFn,
    body_snapshot,
    duality_product_check,
    gauss_curvature,
    gauss_map_mass,
    polar_dual,
    principal_radii,
    radial_from_support,
    read_snapshot,
    support_from_radial,
    volume,
    volume_from_radial,
    write_snapshot,
)
from gcflow.grid import circle_grid, polar_grid

A, B = 2.0, 1.0  # reference ellipse semi-axes


def ellipse_support(grid, a=A, b=B):
    t = grid.nodes
    return SupportFn(grid, np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2))


def ellipse_radial_exact(angles, a=A, b=B):
    return a * b / np.sqrt(b * b * np.cos(angles) ** 2 + a * a * np.sin(angles) ** 2)


def shifted_disk_support(grid, c):
    return SupportFn(grid, 1.0 + c * np.cos(grid.nodes))


def fourier_support(grid, c0, cos_coeffs):
    u = np.full(grid.size, c0)
    for k, c in enumerate(cos_coeffs, start=1):
        u = u + c * np.cos(k * grid.nodes)
    return SupportFn(grid, u)


class TestPrincipalRadii:
    def test_sphere_all_radii_equal(self):
        for make, N, rho in [(circle_grid, 128, 0.7), (polar_grid, 65, 2.5)]:
            g = make(N)
            b = principal_radii(SupportFn(g, np.full(g.size, rho)))
            assert np.max(np.abs(b - rho)) < 1e-12

    def test_ellipse_closed_form(self):
        g = circle_grid(512)
        sup = ellipse_support(g)
        b = principal_radii(sup)
        exact = A * A * B * B / sup.u**3
        assert np.max(np.abs(b / exact - 1.0)) < 5e-4

    def test_unit_sphere_axisymmetric_poles(self):
        g = polar_grid(65)
        b = principal_radii(SupportFn(g, np.ones(g.size)))
        assert b.shape == (2, g.size)
        assert np.max(np.abs(b - 1.0)) < 1e-12

    def test_convexity_lost_reports_node(self):
        g = circle_grid(64)
        u = 1.0 + 0.8 * np.cos(2 * g.nodes)  # u'' + u dips negative
        with pytest.raises(ConvexityLost) as err:
            principal_radii(SupportFn(g, u))
        assert err.value.node is not None

    def test_spheroid_pole_limit(self):
        # oblate spheroid: b22 at the poles must equal u'' + u there
        g = polar_grid(129)
        a, c = 1.2, 0.8
        u = np.sqrt(a * a * np.sin(g.nodes) ** 2 + c * c * np.cos(g.nodes) ** 2)
        b = principal_radii(SupportFn(g, u))
        # closed forms: b11 = a^2 c^2 / u^3, b22 = a^2 / u
        assert np.max(np.abs(b[0] * u**3 / (a * a * c * c) - 1.0)) < 2e-3
        assert np.max(np.abs(b[1] * u / (a * a) - 1.0)) < 2e-3


class TestGaussCurvature:
    def test_sphere(self):
        g = circle_grid(64)
        K = gauss_curvature(SupportFn(g, np.full(g.size, 2.0)))
        assert np.max(np.abs(K - 0.5)) < 1e-12
        g2 = polar_grid(65)
        K2 = gauss_curvature(SupportFn(g2, np.full(g2.size, 2.0)))
        assert np.max(np.abs(K2 - 0.25)) < 1e-12

    def test_ellipse_closed_form(self):
        g = circle_grid(512)
        sup = ellipse_support(g)
        K = gauss_curvature(sup)
        assert np.max(np.abs(K * A * A * B * B / sup.u**3 - 1.0)) < 5e-4

    def test_perturbed_circle_total_turning(self):
        # integral of b equals integral of u since u'' integrates to zero
        g = circle_grid(256)
        sup = SupportFn(g, 1.0 + 0.1 * np.cos(2 * g.nodes))
        K = gauss_curvature(sup)
        assert np.all(K > 0)
        assert np.sum(g.weights / K) == pytest.approx(np.sum(g.weights * sup.u), abs=1e-10)


class TestRadialFromSupport:
    def test_sphere_identity(self):
        g = circle_grid(64)
        rad = radial_from_support(SupportFn(g, np.full(g.size, 1.3)))
        assert np.max(np.abs(rad.r - 1.3)) < 1e-12

    def test_ellipse_polar_form(self):
        g = circle_grid(512)
        rad = radial_from_support(ellipse_support(g))
        assert np.max(np.abs(rad.r - ellipse_radial_exact(g.nodes))) < 1e-3

    def test_shifted_disk(self):
        g = circle_grid(512)
        rad = radial_from_support(shifted_disk_support(g, 0.3))
        exact = 0.3 * np.cos(g.nodes) + np.sqrt(1.0 - 0.09 * np.sin(g.nodes) ** 2)
        assert np.max(np.abs(rad.r - exact)) < 1e-3

    def test_radial_bounded_by_support_range(self):
        g = circle_grid(256)
        sup = fourier_support(g, 1.0, [0.0, 0.15, 0.0, 0.02])
        rad = radial_from_support(sup)
        assert np.all(rad.r >= np.min(sup.u) - 1e-12)
        assert np.all(rad.r <= np.max(sup.u) + 1e-12)

    def test_spheroid_axisymmetric(self):
        g = polar_grid(257)
        a, c = 1.2, 0.8
        u = np.sqrt(a * a * np.sin(g.nodes) ** 2 + c * c * np.cos(g.nodes) ** 2)
        rad = radial_from_support(SupportFn(g, u))
        exact = 1.0 / np.sqrt((np.sin(g.nodes) / a) ** 2 + (np.cos(g.nodes) / c) ** 2)
        assert np.max(np.abs(rad.r - exact)) < 1e-3


class TestSupportFromRadial:
    def test_sphere(self):
        g = circle_grid(64)
        sup = support_from_radial(RadialFn(g, np.full(g.size, 0.9)))
        assert np.max(np.abs(sup.u - 0.9)) < 1e-12

    def test_round_trip_ellipse(self):
        g = circle_grid(512)
        sup = ellipse_support(g)
        back = support_from_radial(radial_from_support(sup))
        assert np.max(np.abs(back.u - sup.u)) < 1e-3

    def test_shifted_disk_inverse(self):
        g = circle_grid(512)
        rad = RadialFn(g, 0.3 * np.cos(g.nodes)
                       + np.sqrt(1.0 - 0.09 * np.sin(g.nodes) ** 2))
        sup = support_from_radial(rad)
        assert np.max(np.abs(sup.u - (1.0 + 0.3 * np.cos(g.nodes)))) < 1e-3

    def test_round_trip_spheroid(self):
        g = polar_grid(257)
        a, c = 1.2, 0.8
        u = np.sqrt(a * a * np.sin(g.nodes) ** 2 + c * c * np.cos(g.nodes) ** 2)
        back = support_from_radial(radial_from_support(SupportFn(g, u)))
        assert np.max(np.abs(back.u - u)) < 2e-3

    @settings(max_examples=15, deadline=None)
    @given(c2=st.floats(-0.1, 0.1), c3=st.floats(-0.03, 0.03), c4=st.floats(-0.015, 0.015))
    def test_round_trip_fourier_bodies(self, c2, c3, c4):
        # coefficient box keeps u'' + u >= 1 - 3|c2| - 8|c3| - 15|c4| > 0
        g = circle_grid(256)
        sup = fourier_support(g, 1.0, [0.0, c2, c3, c4])
        back = support_from_radial(radial_from_support(sup))
        assert np.max(np.abs(back.u - sup.u)) < 2e-3


class TestSnapshotConsistency:
    def test_radial_matches_pointwise_distance(self):
        # r(xi(x)) must reproduce sqrt(u^2 + u'^2)(x) within interpolation error
        g = circle_grid(512)
        body = body_snapshot(ellipse_support(g))
        rad_at_xi = np.interp(np.mod(body.xi_of_x, 2 * np.pi), g.nodes, body.r.r,
                              period=2 * np.pi)
        assert np.max(np.abs(rad_at_xi - body.r_of_x)) < 2e-3

    def test_kappa_bounds(self):
        g = circle_grid(512)
        body = body_snapshot(ellipse_support(g))
        # ellipse curvature range is [b/a^2, a/b^2]
        assert body.kappa_min == pytest.approx(B / A**2, rel=1e-3)
        assert body.kappa_max == pytest.approx(A / B**2, rel=1e-3)


class TestPolarDual:
    def test_sphere_reciprocal(self):
        g = circle_grid(64)
        dual = polar_dual(body_snapshot(SupportFn(g, np.full(g.size, 2.0))))
        assert np.max(np.abs(dual.u.u - 0.5)) < 1e-12

    def test_ellipse_dual_axes(self):
        g = circle_grid(512)
        body = body_snapshot(ellipse_support(g))
        dual = polar_dual(body)
        exact = np.sqrt(np.cos(g.nodes) ** 2 / A**2 + np.sin(g.nodes) ** 2 / B**2)
        assert np.max(np.abs(dual.u.u - exact)) < 1e-3
        # u* = 1/r holds exactly by construction (one rounding ulp)
        assert np.max(np.abs(dual.u.u * body.r.r - 1.0)) < 1e-15

    def test_double_dual_is_identity(self):
        g = circle_grid(512)
        body = body_snapshot(ellipse_support(g))
        back = polar_dual(polar_dual(body))
        assert np.max(np.abs(back.u.u - body.u.u)) < 2e-3


class TestDualityProduct:
    def test_sphere_exact(self):
        g = circle_grid(64)
        body = body_snapshot(SupportFn(g, np.full(g.size, 2.0)))
        assert duality_product_check(body) < 1e-12

    def test_ellipse_deviation_small(self):
        g = circle_grid(512)
        assert duality_product_check(body_snapshot(ellipse_support(g))) < 5e-3

    def test_second_order_refinement(self):
        devs = []
        for N in (256, 512):
            g = circle_grid(N)
            devs.append(duality_product_check(body_snapshot(ellipse_support(g))))
        order = np.log2(devs[0] / devs[1])
        assert order >= 1.9


class TestVolume:
    def test_unit_disk(self):
        g = circle_grid(128)
        assert volume(body_snapshot(SupportFn(g, np.ones(g.size)))) == pytest.approx(np.pi, abs=1e-10)

    def test_unit_ball(self):
        g = polar_grid(129)
        got = volume(body_snapshot(SupportFn(g, np.ones(g.size))))
        assert got == pytest.approx(4 * np.pi / 3, rel=1e-3)

    def test_ellipse_area_both_forms(self):
        g = circle_grid(512)
        body = body_snapshot(ellipse_support(g))
        assert volume(body) == pytest.approx(np.pi * A * B, abs=1e-3)
        assert volume_from_radial(body) == pytest.approx(np.pi * A * B, abs=1e-3)

    def test_blaschke_santalo(self):
        # origin-symmetric bodies: vol * dual vol <= vol(B1)^2 (+ slack);
        # tested away from the ellipsoid equality case, which sits on the
        # inequality boundary at discretization accuracy
        g = circle_grid(512)
        for sup in (SupportFn(g, np.ones(g.size)),
                    fourier_support(g, 1.0, [0.0, 0.0, 0.0, 0.05])):
            body = body_snapshot(sup)
            prod = volume(body) * volume(polar_dual(body))
            assert prod <= np.pi**2 + 1e-6


class TestGaussMapMass:
    def test_mass_is_sphere_area(self):
        g = circle_grid(512)
        for sup in (SupportFn(g, np.ones(g.size)),
                    ellipse_support(g),
                    fourier_support(g, 1.0, [0.0, 0.15, 0.0, 0.02])):
            got = gauss_map_mass(body_snapshot(sup))
            assert got == pytest.approx(2 * np.pi, abs=1e-6)

    def test_mass_axisymmetric(self):
        g = polar_grid(257)
        a, c = 1.2, 0.8
        u = np.sqrt(a * a * np.sin(g.nodes) ** 2 + c * c * np.cos(g.nodes) ** 2)
        got = gauss_map_mass(body_snapshot(SupportFn(g, u)))
        assert got == pytest.approx(4 * np.pi, rel=1e-3)


class TestSerialization:
    def test_round_trip(self, tmp_path):
        g = circle_grid(128)
        body = body_snapshot(ellipse_support(g))
        path = tmp_path / "snap.txt"
        write_snapshot(body, path, t=1.5)
        back, t = read_snapshot(path)
        assert t == 1.5
        assert np.max(np.abs(back.u.u - body.u.u)) < 1e-15
        assert np.max(np.abs(back.r.r - body.r.r)) < 1e-15

    def test_axisymmetric_columns(self, tmp_path):
        g = polar_grid(65)
        body = body_snapshot(SupportFn(g, np.full(g.size, 1.0)))
        path = tmp_path / "snap2.txt"
        write_snapshot(body, path, t=0.0)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# n=2 N=65")
        assert len(lines[2].split()) == 6  # theta u r K b11 b22
