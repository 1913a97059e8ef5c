"""Independent brute-force validators.

Everything here works directly on point samples or plain quadrature and
deliberately imports nothing from the geometry or flow modules, so these
routines can vouch for those modules without sharing their code paths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ParametricCurve",
    "parametric_curvature_oracle",
    "polygon_integral_gauss_curvature",
    "reference_quadrature",
    "random_convex_polygon",
    "smoothed_polygon_support",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ParametricCurve:
    """Closed convex curve given by counterclockwise point samples.

    ``points`` has shape (M, 2).  Construction verifies simple convexity:
    every cross product of consecutive edges must be positive.
    """

    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2 or p.shape[0] < 3:
            raise ValueError("points must be an (M, 2) array with M >= 3")
        e = np.roll(p, -1, axis=0) - p
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        if np.any(cross <= 0.0):
            raise ValueError("curve is not convex/counterclockwise")
        object.__setattr__(self, "points", p)


def _edges(curve: ParametricCurve) -> np.ndarray:
    p = curve.points
    return np.roll(p, -1, axis=0) - p


def _turning_angles(curve: ParametricCurve) -> np.ndarray:
    """Exterior angle at each vertex (angle between incoming and outgoing edge)."""
    e = _edges(curve)
    e_prev = np.roll(e, 1, axis=0)
    cross = e_prev[:, 0] * e[:, 1] - e_prev[:, 1] * e[:, 0]
    dot = np.einsum("ij,ij->i", e_prev, e)
    return np.arctan2(cross, dot)


def parametric_curvature_oracle(curve: ParametricCurve) -> np.ndarray:
    """Discrete curvature: turning angle divided by mean adjacent edge length."""
    e = _edges(curve)
    lengths = np.hypot(e[:, 0], e[:, 1])
    ds = 0.5 * (np.roll(lengths, 1) + lengths)
    return _turning_angles(curve) / ds


def polygon_integral_gauss_curvature(curve: ParametricCurve, omega: tuple[float, float]) -> float:
    """Total exterior angle over vertices whose radial direction lies in omega.

    ``omega = (lo, hi)`` is an arc of directions; ``hi`` may exceed ``lo`` by
    up to 2*pi (a full circle returns the total turning 2*pi).  The polygon
    must enclose the origin so that radial directions are well defined.
    """
    p = curve.points
    tau = _turning_angles(curve)
    phi = np.mod(np.arctan2(p[:, 1], p[:, 0]), TWO_PI)
    lo, hi = omega
    length = hi - lo
    if length >= TWO_PI:
        return float(np.sum(tau))
    rel = np.mod(phi - lo, TWO_PI)
    return float(np.sum(tau[rel < length]))


def reference_quadrature(fn, n: int, nodes: int = 1_000_000) -> float:
    """High-resolution composite quadrature used as ground truth in tests.

    n=1 integrates ``fn(theta) dtheta`` over [0, 2*pi) with the periodic
    midpoint rule; n=2 integrates over [0, pi] with composite Simpson.
    The sphere-measure factor (``2*pi*sin(theta)`` for n=2) is up to the
    caller's integrand.
    """
    if n == 1:
        h = TWO_PI / nodes
        theta = h * (np.arange(nodes) + 0.5)
        return float(h * np.sum(fn(theta)))
    if n == 2:
        m = nodes + 1 if nodes % 2 == 0 else nodes
        theta = np.linspace(0.0, np.pi, m)
        vals = fn(theta)
        h = theta[1] - theta[0]
        s = vals[0] + vals[-1] + 4.0 * np.sum(vals[1:-1:2]) + 2.0 * np.sum(vals[2:-1:2])
        return float(s * h / 3.0)
    raise ValueError(f"n must be 1 or 2, got {n}")


def random_convex_polygon(num_vertices: int, seed: int, radius_range=(0.8, 1.2)) -> ParametricCurve:
    """Random convex polygon with the origin well inside (hull of radial samples)."""
    from scipy.spatial import ConvexHull

    rng = np.random.default_rng(seed)
    # oversample so the hull keeps roughly num_vertices vertices
    m = 4 * num_vertices
    ang = np.sort(rng.uniform(0.0, TWO_PI, m))
    rad = rng.uniform(*radius_range, m)
    pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    hull = ConvexHull(pts)
    verts = pts[hull.vertices]
    if len(verts) > num_vertices:
        keep = np.linspace(0, len(verts), num_vertices, endpoint=False).astype(int)
        verts = verts[keep]
    return ParametricCurve(points=verts)


def smoothed_polygon_support(curve: ParametricCurve, angles: np.ndarray, sigma: float) -> np.ndarray:
    """Support-function samples of a polygon mollified by a wrapped Gaussian.

    Convolving a support function with a nonnegative kernel on the circle is
    again a support function (a Minkowski average of rotated copies), so the
    result stays convex while the corner curvature atoms get spread out.
    Returns raw samples; callers wrap them in their own body type.
    """
    p = curve.points
    u_raw = np.max(np.cos(angles)[:, None] * p[None, :, 0]
                   + np.sin(angles)[:, None] * p[None, :, 1], axis=1)
    N = angles.size
    offsets = TWO_PI * np.arange(N) / N
    offsets = np.where(offsets > np.pi, offsets - TWO_PI, offsets)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    kernel /= kernel.sum()
    return np.real(np.fft.ifft(np.fft.fft(u_raw) * np.fft.fft(kernel)))
