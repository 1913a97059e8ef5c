"""Convex bodies via support and radial functions: curvature, conversions, duality.

A body enclosing the origin is stored either through its support function
``u`` (indexed by outer normal angle) or its radial function ``r`` (indexed
by direction angle).  Both live on the same :class:`~gcflow.grid.SphericalGrid`.
The conversion between the two goes through the boundary-point map

    y(x) = u(x) x + grad u(x),    r = |y| = sqrt(u^2 + |grad u|^2),

whose direction angle ``xi(x)`` is a strictly increasing circle (or
interval) map for uniformly convex bodies; losing that monotonicity, or a
nonpositive principal radius, raises :class:`ConvexityLost`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConvexityLost
from .grid import SphericalGrid, TWO_PI, circle_grid, deriv1, deriv2, integrate, polar_grid

__all__ = [
    "SupportFn",
    "RadialFn",
    "BodySnapshot",
    "principal_radii",
    "gauss_curvature",
    "radial_from_support",
    "support_from_radial",
    "body_snapshot",
    "polar_dual",
    "duality_product_check",
    "volume",
    "volume_from_radial",
    "gauss_map_mass",
    "write_snapshot",
    "read_snapshot",
]


@dataclass(frozen=True)
class SupportFn:
    """Support function samples on a grid; the flow's state variable.

    ``u`` must be positive everywhere (the body encloses the origin).
    Uniform convexity (positive principal radii) is enforced wherever radii
    are actually computed, not at construction.
    """

    grid: SphericalGrid
    u: np.ndarray

    def __post_init__(self):
        self.grid.check_size(self.u)
        if not np.all(np.isfinite(self.u)):
            raise ValueError("support function has non-finite entries")
        if np.any(self.u <= 0.0):
            i = int(np.argmin(self.u))
            raise ConvexityLost("support function not positive", node=i, value=float(self.u[i]))
        self.u.setflags(write=False)


@dataclass(frozen=True)
class RadialFn:
    """Radial function samples over direction angles (origin inside the body)."""

    grid: SphericalGrid
    r: np.ndarray

    def __post_init__(self):
        self.grid.check_size(self.r)
        if not np.all(np.isfinite(self.r)):
            raise ValueError("radial function has non-finite entries")
        if np.any(self.r <= 0.0):
            i = int(np.argmin(self.r))
            raise ConvexityLost("radial function not positive", node=i, value=float(self.r[i]))
        self.r.setflags(write=False)

    def convexity_margin(self) -> float:
        """Min of the convexity indicator of the polar graph.

        n=1: r^2 + 2 r'^2 - r r'' > 0.  n=2 (axisymmetric): the same
        condition for the meridian plus positivity of the azimuthal normal
        component r sin(theta) - r' cos(theta) on the open interval.
        """
        g = self.grid
        r = self.r
        dr = deriv1(r, g)
        ddr = deriv2(r, g)
        meridian = r * r + 2.0 * dr * dr - r * ddr
        if g.n == 1:
            return float(np.min(meridian))
        azim = r[1:-1] * np.sin(g.nodes[1:-1]) - dr[1:-1] * np.cos(g.nodes[1:-1])
        return float(min(np.min(meridian), np.min(azim)))


@dataclass(frozen=True)
class BodySnapshot:
    """One body with both representations plus curvature data.

    ``K_of_x`` is the Gauss curvature indexed by normal angle, ``xi_of_x``
    the direction angle of the boundary point with that normal (unwrapped,
    strictly increasing), ``r_of_x`` the pointwise distance
    sqrt(u^2 + |grad u|^2) of the same point.
    """

    u: SupportFn
    r: RadialFn
    K_of_x: np.ndarray
    xi_of_x: np.ndarray
    r_of_x: np.ndarray
    kappa_min: float
    kappa_max: float

    @property
    def grid(self) -> SphericalGrid:
        return self.u.grid


def _check_radii(b: np.ndarray, label: str) -> None:
    if np.any(b <= 0.0):
        i = int(np.argmin(b))
        raise ConvexityLost(f"principal radius {label} not positive", node=i, value=float(b[i]))


def principal_radii(sup: SupportFn) -> np.ndarray:
    """Principal curvature radii, eigenvalues of (hessian of u) + u*I.

    n=1 returns shape (N,): b = u'' + u.  n=2 returns shape (2, N):
    b11 = u'' + u along the meridian and b22 = u' cot(theta) + u around the
    axis, with b22 replaced by its pole limit u'' + u at theta in {0, pi}.
    Raises ConvexityLost if any radius is nonpositive.
    """
    g = sup.grid
    u = sup.u
    b1 = deriv2(u, g) + u
    if g.n == 1:
        _check_radii(b1, "u''+u")
        return b1
    du = deriv1(u, g)
    b2 = np.empty_like(b1)
    b2[1:-1] = du[1:-1] / np.tan(g.nodes[1:-1]) + u[1:-1]
    b2[0] = b1[0]
    b2[-1] = b1[-1]
    _check_radii(b1, "b11")
    _check_radii(b2, "b22")
    return np.stack([b1, b2])


def gauss_curvature(sup: SupportFn) -> np.ndarray:
    """Gauss curvature K = 1/det of the radii matrix, per normal-angle node."""
    b = principal_radii(sup)
    if sup.grid.n == 1:
        return 1.0 / b
    return 1.0 / (b[0] * b[1])


def _xi_and_r(sup: SupportFn) -> tuple[np.ndarray, np.ndarray]:
    """Direction angle and distance of each boundary point y = u x + grad u.

    In the local frame (x, tangent) the point sits at angle
    arctan(u'/u) from the normal, so xi = theta + atan2(u', u); this form is
    smooth and already unwrapped.  Monotonicity of xi is the discrete
    convexity check for the conversion.
    """
    g = sup.grid
    du = deriv1(sup.u, g)
    xi = g.nodes + np.arctan2(du, sup.u)
    r = np.hypot(sup.u, du)
    d = np.diff(xi)
    if g.n == 1:
        d = np.append(d, xi[0] + TWO_PI - xi[-1])
    if np.any(d <= 0.0):
        i = int(np.argmin(d))
        raise ConvexityLost("direction angles not strictly increasing", node=i, value=float(d[i]))
    return xi, r


def _spline_periodic(x: np.ndarray, y: np.ndarray, x_eval: np.ndarray) -> np.ndarray:
    """C^2 cubic interpolation of one period of scattered circle data.

    ``x`` must be strictly increasing and span less than 2*pi.  A C^2
    interpolant matters here: resampled values get second-differenced
    downstream (dual-body curvature), and a merely C^1 scheme would leave
    only O(h) accuracy there.
    """
    xs = np.concatenate([x, x[:1] + TWO_PI])
    ys = np.concatenate([y, y[:1]])
    interp = CubicSpline(xs, ys, bc_type="periodic")
    t = x[0] + np.mod(x_eval - x[0], TWO_PI)
    return interp(t)


def radial_from_support(sup: SupportFn) -> RadialFn:
    """Radial function resampled onto the grid's direction-angle nodes.

    The scattered exact pairs (xi_i, r_i) of the boundary points are
    interpolated by a C^2 cubic spline (periodic for n=1, zero-slope ends
    for n=2, matching the even pole closure) (xi equals theta exactly at the poles).
    """
    g = sup.grid
    xi, r = _xi_and_r(sup)
    # interpolate log r: the exponential keeps the resampled values positive
    # even for nearly degenerate bodies, where a spline in r can overshoot
    if g.n == 1:
        vals = np.exp(_spline_periodic(xi, np.log(r), g.nodes))
    else:
        interp = CubicSpline(xi, np.log(r), bc_type=((1, 0.0), (1, 0.0)))
        vals = np.exp(interp(np.clip(g.nodes, xi[0], xi[-1])))
    return RadialFn(g, vals)


def support_from_radial(rad: RadialFn) -> SupportFn:
    """Discrete Legendre transform u(x) = max_xi r(xi) <x, xi>.

    The maximum over grid nodes is refined by a three-point parabola fit
    around the argmax, restoring second-order accuracy.
    """
    g = rad.grid
    r = rad.r
    nodes = g.nodes
    if g.n == 1:
        diff = nodes[:, None] - nodes[None, :]
        F = np.cos(diff) * r[None, :]
        jstar = np.argmax(F, axis=1)
        idx = np.arange(g.size)
        f0 = F[idx, jstar]
        fp = F[idx, (jstar + 1) % g.size]
        fm = F[idx, (jstar - 1) % g.size]
    else:
        diff = nodes[:, None] - nodes[None, :]
        F = np.cos(diff) * r[None, :]
        jstar = np.argmax(F, axis=1)
        idx = np.arange(g.size)
        f0 = F[idx, jstar]
        # even reflection across the poles supplies the missing neighbor
        jp = np.where(jstar + 1 <= g.size - 1, jstar + 1, g.size - 2)
        jm = np.where(jstar - 1 >= 0, jstar - 1, 1)
        fp = np.where(jstar + 1 <= g.size - 1,
                      F[idx, jp],
                      r[jp] * np.cos(nodes[idx] - (TWO_PI - nodes[jp])))
        fm = np.where(jstar - 1 >= 0, F[idx, jm], r[jm] * np.cos(nodes[idx] + nodes[jm]))
    denom = 2.0 * f0 - fp - fm
    corr = np.where(denom > 0.0, (fp - fm) ** 2 / (8.0 * denom), 0.0)
    return SupportFn(g, f0 + corr)


def body_snapshot(sup: SupportFn, radial: RadialFn | None = None) -> BodySnapshot:
    """Assemble the full snapshot; ``radial`` overrides the resampled one.

    Passing exact radial samples (when a closed form is known) avoids the
    interpolation error of the conversion in downstream integrals.
    """
    g = sup.grid
    b = principal_radii(sup)
    if g.n == 1:
        K = 1.0 / b
        bmin, bmax = b.min(), b.max()
    else:
        K = 1.0 / (b[0] * b[1])
        bmin, bmax = b.min(), b.max()
    xi, r_pt = _xi_and_r(sup)
    rad = radial if radial is not None else radial_from_support(sup)
    return BodySnapshot(
        u=sup,
        r=rad,
        K_of_x=K,
        xi_of_x=xi,
        r_of_x=r_pt,
        kappa_min=float(1.0 / bmax),
        kappa_max=float(1.0 / bmin),
    )


def polar_dual(body: BodySnapshot) -> BodySnapshot:
    """Polar dual body: dual support function u*(xi) = 1/r(xi), rebuilt in full."""
    dual_sup = SupportFn(body.grid, 1.0 / body.r.r)
    return body_snapshot(dual_sup)


def duality_product_check(body: BodySnapshot) -> float:
    """Max deviation of u^{n+2} (u*)^{n+2} / (K K*) from 1 over paired nodes.

    Pairing: the boundary point with normal x has direction xi(x); the dual
    body's point with normal xi(x) closes the pair (their inner product is
    one).  u*(xi(x)) = 1/r(xi(x)) is evaluated pointwise; K* is interpolated
    from the dual snapshot's nodes.
    """
    g = body.grid
    dual = polar_dual(body)
    n = g.n
    ustar = 1.0 / body.r_of_x
    if n == 1:
        Kstar = _spline_periodic(g.nodes, dual.K_of_x, body.xi_of_x)
    else:
        interp = CubicSpline(g.nodes, dual.K_of_x)
        Kstar = interp(np.clip(body.xi_of_x, 0.0, np.pi))
    prod = (body.u.u * ustar) ** (n + 2) / (body.K_of_x * Kstar)
    return float(np.max(np.abs(prod - 1.0)))


def volume(body: BodySnapshot) -> float:
    """Enclosed volume, 1/(n+1) * integral of u/K over normal angles."""
    g = body.grid
    return integrate(body.u.u / body.K_of_x, g) / (g.n + 1)


def volume_from_radial(body: BodySnapshot) -> float:
    """Same volume from the radial side, 1/(n+1) * integral of r^{n+1}."""
    g = body.grid
    return integrate(body.r.r ** (g.n + 1), g) / (g.n + 1)


def gauss_map_mass(body: BodySnapshot) -> float:
    """Total mass of the direction-angle measure, integral of u/(r^{n+1} K).

    Must equal |S^n| for a valid convex body (the inverse Gauss map covers
    the sphere exactly once).  For n=1 the integrand is evaluated with
    spectral derivatives of u, which keeps the check at quadrature accuracy
    instead of inheriting the O(h^2) bias of the difference stencils; for
    n=2 the centered-difference form is integrated.
    """
    g = body.grid
    u = body.u.u
    if g.n == 1:
        k = np.fft.rfftfreq(g.size, d=1.0 / g.size)
        uh = np.fft.rfft(u)
        du = np.fft.irfft(1j * k * uh, n=g.size)
        b = np.fft.irfft((1.0 - k * k) * uh, n=g.size)
        r2 = u * u + du * du
        return integrate(u * b / r2, g)
    b = principal_radii(body.u)
    jac = body.u.u * b[0] * b[1] / body.r_of_x ** 3
    return integrate(jac, g)


# -- snapshot serialization --------------------------------------------------

def write_snapshot(body: BodySnapshot, path, t: float = 0.0) -> None:
    """Plain-text table, one node per line: theta u r K b11 [b22]."""
    g = body.grid
    b = principal_radii(body.u)
    cols = [g.nodes, body.u.u, body.r.r, body.K_of_x]
    header = "theta u r K b11"
    if g.n == 1:
        cols.append(b)
    else:
        cols.extend([b[0], b[1]])
        header += " b22"
    with open(path, "w") as fh:
        fh.write(f"# n={g.n} N={g.size} t={t:.17g}\n")
        fh.write(f"# {header}\n")
        for row in zip(*cols):
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def read_snapshot(path) -> tuple[BodySnapshot, float]:
    """Read a table written by :func:`write_snapshot`; returns (body, t)."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# n="):
            raise ValueError(f"{path}: not a snapshot file")
        fields = dict(tok.split("=") for tok in first[2:].split())
        n, N, t = int(fields["n"]), int(fields["N"]), float(fields["t"])
        fh.readline()  # column header
        data = np.loadtxt(fh)
    if data.shape[0] != N:
        raise ValueError(f"{path}: expected {N} rows, found {data.shape[0]}")
    g = circle_grid(N) if n == 1 else polar_grid(N)
    sup = SupportFn(g, data[:, 1].copy())
    rad = RadialFn(g, data[:, 2].copy())
    return body_snapshot(sup, radial=rad), t
