"""Flow functionals, conserved integrals, curvature measures, admissibility checks.

Conventions: ``alpha`` is the speed exponent of the flow, ``q = n + 1 - alpha``.
Integrals over direction angles are either taken on the resampled radial
grid (the snapshot-based operations below) or pulled back to normal angles
through the change of variables

    d(xi) = u / (r^{n+1} K) d(x),

which is how the dual curvature measures are evaluated: no image sets are
ever materialized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import BodySnapshot
from .grid import SphericalGrid, TWO_PI, integrate

__all__ = [
    "AnisotropyF",
    "constant_f",
    "cosine_f",
    "tabulated_f",
    "spike_f",
    "FunctionalReport",
    "functional_J",
    "integral_I_q",
    "soliton_residual",
    "functional_report",
    "report_csv_header",
    "report_csv_row",
    "dual_curvature_measure",
    "AleksandrovReport",
    "aleksandrov_check",
]


@dataclass(frozen=True)
class AnisotropyF:
    """Positive weight function on S^n, evaluated at grid nodes.

    kind is one of ``constant``, ``cosine-polynomial`` (c0 + sum of
    cos/sin harmonics in the node angle) or ``tabulated``.  When ``even``
    is set the node values are symmetrized exactly under the antipodal map
    (theta -> theta + pi for n=1, theta -> pi - theta for n=2), so flows
    started from symmetric data stay symmetric to rounding.
    """

    kind: str
    c0: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    table: np.ndarray | None = None
    even: bool = False
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def values(self, grid: SphericalGrid) -> np.ndarray:
        key = id(grid)
        if key in self._cache:
            return self._cache[key]
        if self.kind == "constant":
            vals = np.full(grid.size, self.c0)
        elif self.kind == "cosine-polynomial":
            theta = grid.nodes
            vals = np.full(grid.size, self.c0)
            for k, c in enumerate(self.cos_coeffs, start=1):
                vals += c * np.cos(k * theta)
            for k, s in enumerate(self.sin_coeffs, start=1):
                vals += s * np.sin(k * theta)
        elif self.kind == "tabulated":
            grid.check_size(self.table)
            vals = np.asarray(self.table, dtype=float).copy()
        else:
            raise ValueError(f"unknown anisotropy kind '{self.kind}'")
        if self.even:
            vals = self._symmetrize(vals, grid)
        if np.any(vals <= 0.0):
            i = int(np.argmin(vals))
            raise ValueError(f"anisotropy not positive (node {i}, value {vals[i]:.6g})")
        vals.setflags(write=False)
        self._cache[key] = vals
        return vals

    @staticmethod
    def _symmetrize(vals: np.ndarray, grid: SphericalGrid) -> np.ndarray:
        if grid.n == 1:
            if grid.size % 2:
                return vals  # antipodal node pairing needs even N
            half = grid.size // 2
            return 0.5 * (vals + np.roll(vals, half))
        return 0.5 * (vals + vals[::-1])

    def evenness_defect(self, grid: SphericalGrid) -> float:
        """Max |f(x) - f(-x)| over paired nodes."""
        vals = self.values(grid)
        if grid.n == 1:
            if grid.size % 2:
                raise ValueError("antipodal pairing needs an even node count")
            return float(np.max(np.abs(vals - np.roll(vals, grid.size // 2))))
        return float(np.max(np.abs(vals - vals[::-1])))


def constant_f(c: float) -> AnisotropyF:
    return AnisotropyF(kind="constant", c0=c, even=True)


def cosine_f(c0: float, cos_coeffs=(), sin_coeffs=(), even: bool = False) -> AnisotropyF:
    return AnisotropyF(kind="cosine-polynomial", c0=c0,
                       cos_coeffs=tuple(cos_coeffs), sin_coeffs=tuple(sin_coeffs), even=even)


def tabulated_f(values: np.ndarray, even: bool = False) -> AnisotropyF:
    return AnisotropyF(kind="tabulated", table=np.asarray(values, dtype=float), even=even)


def spike_f(grid: SphericalGrid, center: float, width: float, mass_fraction: float) -> AnisotropyF:
    """Concentrated weight: a smooth bump of the given width carrying
    ``mass_fraction`` of the total, the rest spread uniformly; normalized so
    the discrete integral equals |S^n| exactly.
    """
    theta = grid.nodes
    if grid.n == 1:
        d = np.angle(np.exp(1j * (theta - center)))
    else:
        d = theta - center
    x = np.clip(2.0 * d / width, -1.0, 1.0)
    bump = np.where(np.abs(x) < 1.0, np.exp(-1.0 / np.maximum(1.0 - x * x, 1e-300)), 0.0)
    area = grid.sphere_area
    bump_mass = integrate(bump, grid)
    if bump_mass <= 0.0:
        raise ValueError("spike width unresolved by the grid")
    vals = mass_fraction * area * bump / bump_mass + (1.0 - mass_fraction) * np.ones(grid.size)
    return tabulated_f(vals)


# -- functionals --------------------------------------------------------------

@dataclass(frozen=True)
class FunctionalReport:
    J_alpha: float
    I_q: float
    log_r_integral: float
    residual_max: float
    residual_l2: float


def functional_J(body: BodySnapshot, f: AnisotropyF, alpha: float) -> float:
    """Monotone flow energy.

    alpha = n+1:   integral of f log u  -  integral of log r
    otherwise:     integral of f log u  -  (1/q) integral of r^q,  q = n+1-alpha.
    """
    g = body.grid
    fv = f.values(g)
    first = integrate(fv * np.log(body.u.u), g)
    q = g.n + 1 - alpha
    if q == 0.0:
        return first - integrate(np.log(body.r.r), g)
    return first - integrate(body.r.r ** q, g) / q


def integral_I_q(body: BodySnapshot, q: float) -> float:
    """Integral of r^q over direction angles."""
    return integrate(body.r.r ** q, body.grid)


def soliton_residual(body: BodySnapshot, f: AnisotropyF, alpha: float) -> np.ndarray:
    """Pointwise defect f r^alpha K - u of the homothetic-limit equation.

    ``r`` is the pointwise distance sqrt(u^2 + |grad u|^2) of the boundary
    point, so the residual is exactly minus the normalized flow velocity.
    """
    g = body.grid
    fv = f.values(g)
    return fv * body.r_of_x ** alpha * body.K_of_x - body.u.u


def functional_report(body: BodySnapshot, f: AnisotropyF, alpha: float) -> FunctionalReport:
    g = body.grid
    q = g.n + 1 - alpha
    res = soliton_residual(body, f, alpha)
    return FunctionalReport(
        J_alpha=functional_J(body, f, alpha),
        I_q=integral_I_q(body, q),
        log_r_integral=integrate(np.log(body.r.r), g),
        residual_max=float(np.max(np.abs(res))),
        residual_l2=float(np.sqrt(integrate(res * res, g))),
    )


def report_csv_header() -> str:
    return "t,J_alpha,I_q,log_r_integral,residual_max,residual_l2"


def report_csv_row(report: FunctionalReport, t: float) -> str:
    vals = (t, report.J_alpha, report.I_q, report.log_r_integral,
            report.residual_max, report.residual_l2)
    return ",".join(f"{v:.17g}" for v in vals)


# -- dual curvature measures ---------------------------------------------------

def _interval_quadrature(density: np.ndarray, grid: SphericalGrid, lo: float, hi: float) -> float:
    """Integral of a nodal density over an angle interval, with linear
    end-cell correction (keeps the O(h^2) accuracy that plain node
    indicator sums would lose at the interval ends)."""
    nodes = grid.nodes
    if grid.n == 1:
        length = min(hi - lo, TWO_PI)
        if length <= 0.0:
            return 0.0
        ext_nodes = np.concatenate([nodes, nodes + TWO_PI, nodes + 2 * TWO_PI])
        ext_dens = np.concatenate([density, density, density])
        lo = np.mod(lo, TWO_PI)
        hi = lo + length
    else:
        lo, hi = max(lo, 0.0), min(hi, np.pi)
        if hi <= lo:
            return 0.0
        ext_nodes, ext_dens = nodes, density
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (ext_dens[1:] + ext_dens[:-1])
                                           * np.diff(ext_nodes))])
    return float(np.interp(hi, ext_nodes, cum) - np.interp(lo, ext_nodes, cum))


def dual_curvature_measure(body: BodySnapshot, q: float, omega) -> float:
    """q-th dual curvature measure of a set of normal-angle intervals.

    Evaluated entirely in x-coordinates as the integral of
    r^{q-n-1} u / K over omega; ``omega`` is one ``(lo, hi)`` pair or a list
    of them.  ``(0, 2*pi)`` (n=1) or ``(0, pi)`` (n=2) covers all of S^n.
    """
    g = body.grid
    n = g.n
    integrand = body.r_of_x ** (q - n - 1) * body.u.u / body.K_of_x
    density = integrand if n == 1 else integrand * TWO_PI * np.sin(g.nodes)
    if isinstance(omega, tuple):
        omega = [omega]
    return sum(_interval_quadrature(density, g, lo, hi) for lo, hi in omega)


# -- admissibility of the prescribed data --------------------------------------

@dataclass(frozen=True)
class AleksandrovReport:
    """Outcome of the admissibility check for the prescribed weight.

    ``cdt1_error`` is |integral of f - |S^n||.  ``cdt2_ok`` reports whether
    every tested spherically convex window omega satisfies
    integral_omega f < |S^n| - |dual window|; ``worst_window`` and
    ``worst_margin`` locate the tightest one.  ``family`` records which
    windows were scanned: all grid arcs for n=1 (exhaustive at grid
    resolution), polar caps only for n=2 (a necessary-but-partial check).
    """

    cdt1_error: float
    cdt2_ok: bool
    worst_window: tuple[float, float]
    worst_margin: float
    family: str


def aleksandrov_check(f: AnisotropyF, grid: SphericalGrid) -> AleksandrovReport:
    fv = f.values(grid)
    area = grid.sphere_area
    cdt1_error = abs(integrate(fv, grid) - area)

    if grid.n == 1:
        # arcs [theta_i, theta_{i+j}] of length j*h < pi; dual arc length pi - l
        N = grid.size
        h = grid.h
        ext = np.concatenate([fv, fv])
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (ext[1:] + ext[:-1]) * h)])
        worst_margin = np.inf
        worst = (0.0, 0.0)
        max_j = int(np.floor(np.pi / h))
        if max_j * h >= np.pi:
            max_j -= 1
        starts = np.arange(N)
        for j in range(1, max_j + 1):
            mass = cum[starts + j] - cum[starts]
            margins = (np.pi + j * h) - mass
            i = int(np.argmin(margins))
            if margins[i] < worst_margin:
                worst_margin = float(margins[i])
                worst = (float(grid.nodes[i]), float(grid.nodes[i] + j * h))
        return AleksandrovReport(cdt1_error, worst_margin > 0.0, worst, worst_margin, "arcs")

    # n=2: polar caps of angular radius beta < pi/2 about either pole;
    # the dual of such a cap is the opposite cap of radius pi/2 - beta.
    N = grid.size
    w = grid.weights
    cum_north = np.cumsum(w * fv)
    cum_south = np.cumsum((w * fv)[::-1])
    worst_margin = np.inf
    worst = (0.0, 0.0)
    for k in range(1, N - 1):
        beta = grid.nodes[k]
        if beta >= np.pi / 2:
            break
        bound = TWO_PI * (1.0 + np.sin(beta))
        for mass, window in ((cum_north[k], (0.0, beta)),
                             (cum_south[k], (np.pi - beta, np.pi))):
            margin = bound - mass
            if margin < worst_margin:
                worst_margin = float(margin)
                worst = window
    return AleksandrovReport(cdt1_error, worst_margin > 0.0, worst, worst_margin, "polar-caps")
