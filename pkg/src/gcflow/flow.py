"""Time stepping for the contracting curvature flow and its normalized variant.

The state variable is the support function ``u`` on a uniform angular grid.
In raw mode the speed is ``-f r^alpha K``; in normalized mode ``+u`` is added,
which turns homothetic limits into stationary points of

    f(x) r^alpha K = u  .

The integrator is explicit Euler with an adaptive parabolic step

    dt = cfl * h^2 * min_i  b_min / (f r^alpha K) ,

``b_min`` the smallest principal radius, plus a reject-and-halve guard that
keeps positivity and uniform convexity after every accepted step.  ``r``
inside the speed is always the pointwise sqrt(u^2 + |grad u|^2), never the
resampled radial function, so the stiffest term carries no interpolation
error.

Normalized runs of exponent ``alpha`` with the matching scale rule keep the
exactly conserved integral of the continuous flow (the q-integral of the
radial function for q = n+1-alpha != 0, the log-integral for q = 0) pinned
to its initial value by a tiny per-step rescaling.  For q > 0 the pure
dilation mode of the normalized flow is linearly unstable, so without this
projection discretization drift is eventually amplified exponentially and
the residual stalls well above tolerance; with it the flow converges to the
discrete stationary solution.  Set ``conserve="off"`` to observe the drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import ConvexityLost, StepCollapse
from .functionals import AnisotropyF
from .geometry import RadialFn, SupportFn, radial_from_support
from .grid import SphericalGrid, integrate

__all__ = [
    "FlowConfig",
    "FlowState",
    "DiagnosticsRecord",
    "FlowResult",
    "Outcome",
    "select_phi0",
    "rhs",
    "step",
    "run",
    "barrier_envelope",
    "subsolution_profile",
    "subsolution_time_derivative",
    "verify_subsolution",
    "SubsolutionReport",
]

MAX_HALVINGS = 40


class Outcome(Enum):
    CONVERGED = "converged"
    TIMEOUT = "timeout"
    BLOWUP = "blowup"
    EXTINCT = "extinct"


@dataclass(frozen=True)
class FlowConfig:
    """Flow parameters, normalization rule, step control and stopping rules."""

    alpha: float
    f: AnisotropyF
    mode: str = "normalized"  # "normalized" | "raw"
    phi0_rule: str = "aleksandrov"  # "aleksandrov" | "bracket" | "iq_matching" | "explicit"
    phi0_value: float | None = None
    cfl: float = 0.2
    t_max: float = 10.0
    residual_tol: float = 1e-6
    blowup_ratio: float = 1e3
    min_u_floor: float = 1e-6
    record_every: int = 100
    conserve: str = "auto"  # "auto" | "off"

    def __post_init__(self):
        if self.mode not in ("normalized", "raw"):
            raise ValueError(f"unknown mode '{self.mode}'")
        if self.phi0_rule not in ("aleksandrov", "bracket", "iq_matching", "explicit"):
            raise ValueError(f"unknown phi0 rule '{self.phi0_rule}'")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError("cfl must lie in (0, 1]")
        if min(self.residual_tol, self.blowup_ratio, self.min_u_floor) <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.conserve not in ("auto", "off"):
            raise ValueError(f"unknown conserve setting '{self.conserve}'")

    def q(self, n: int) -> float:
        return n + 1 - self.alpha


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-step scalar diagnostics.

    The functional values (J_alpha, I_q, log_r_integral) are evaluated in
    x-coordinates through the change of variables, consistently with the
    stepper, so their drift is free of interpolation noise.
    """

    t: float
    J_alpha: float
    I_q: float
    log_r_integral: float
    u_min: float
    u_max: float
    r_min: float
    r_max: float
    ratio_R: float
    residual_max: float
    kappa_min: float
    kappa_max: float
    dt: float

    CSV_FIELDS = ("t", "J_alpha", "I_q", "log_r_integral", "u_min", "u_max",
                  "r_min", "r_max", "ratio_R", "residual_max",
                  "kappa_min", "kappa_max", "dt")

    def csv_row(self) -> str:
        return ",".join(f"{getattr(self, name):.17g}" for name in self.CSV_FIELDS)


class _Kernel:
    """All per-node quantities derived from one support-function iterate."""

    __slots__ = ("u", "du", "bmin", "speed", "residual_max", "rhs", "dtcand",
                 "u_min", "u_max", "r_min", "r_max", "ratio", "kappa_min",
                 "kappa_max", "mass", "Iq", "Lr", "Flogu", "J_alpha", "J_np1")


def _wrap_support(grid: SphericalGrid, u: np.ndarray) -> SupportFn:
    """SupportFn constructor bypassing validation; callers must have run the
    kernel checks on ``u`` already (hot path of the stepper)."""
    sup = object.__new__(SupportFn)
    object.__setattr__(sup, "grid", grid)
    object.__setattr__(sup, "u", u)
    u.setflags(write=False)
    return sup


def _rpow(r2: np.ndarray, p: float) -> np.ndarray:
    """r**p given r^2, with fast paths for the common exponents."""
    if p == 0.0:
        return np.ones_like(r2)
    if p == 2.0:
        return r2
    if p == -2.0:
        return 1.0 / r2
    return r2 ** (0.5 * p)


def _principal_radii_arrays(u: np.ndarray, grid: SphericalGrid):
    h2 = grid.h * grid.h
    if grid.n == 1:
        b = (np.roll(u, -1) - 2.0 * u + np.roll(u, 1)) / h2 + u
        return b, None
    b1 = np.empty_like(u)
    b1[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
    b1[0] = 2.0 * (u[1] - u[0]) / h2
    b1[-1] = 2.0 * (u[-2] - u[-1]) / h2
    b1 += u
    du = np.empty_like(u)
    du[1:-1] = (u[2:] - u[:-2]) / (2.0 * grid.h)
    du[0] = du[-1] = 0.0
    b2 = np.empty_like(u)
    b2[1:-1] = du[1:-1] / np.tan(grid.nodes[1:-1]) + u[1:-1]
    b2[0] = b1[0]
    b2[-1] = b1[-1]
    return b1, b2


def _kernel(u: np.ndarray, grid: SphericalGrid, fv: np.ndarray,
            cfg: FlowConfig, strict: bool = False) -> _Kernel | None:
    """Everything the stepper needs from one iterate, or None if the iterate
    left the admissible cone (u > 0, all principal radii > 0).  With
    ``strict`` the failure raises ConvexityLost carrying the worst node."""
    n = grid.n
    h = grid.h
    alpha = cfg.alpha
    q = n + 1 - alpha

    # NaN/inf propagate into min/max, so these two reductions also
    # serve as the finiteness check
    u_min = u.min()
    u_max = u.max()
    if not (u_min > 0.0 and u_max < np.inf):
        if strict:
            i = int(np.argmin(u))
            raise ConvexityLost("support function not positive", node=i, value=float(u[i]))
        return None

    if n == 1:
        up = np.concatenate((u[1:], u[:1]))
        um = np.concatenate((u[-1:], u[:-1]))
        du = (up - um) / (2.0 * h)
        b1 = (up - 2.0 * u + um) / (h * h) + u
        b2 = None
        bprod = bmin = b1
        b1_min = b1.min()
        b_ok = b1_min > 0.0
    else:
        b1, b2 = _principal_radii_arrays(u, grid)
        du = np.empty_like(u)
        du[1:-1] = (u[2:] - u[:-2]) / (2.0 * h)
        du[0] = du[-1] = 0.0
        bprod = b1 * b2
        bmin = np.minimum(b1, b2)
        b_ok = bmin.min() > 0.0

    if not b_ok:
        if strict:
            worst = b1 if b2 is None else bmin
            i = int(np.argmin(worst))
            raise ConvexityLost("principal radius not positive", node=i, value=float(worst[i]))
        return None

    r2 = u * u + du * du
    speed = fv * _rpow(r2, alpha) / bprod
    residual = speed - u
    k = _Kernel()
    k.u = u
    k.du = du
    k.bmin = bmin
    k.speed = speed
    k.residual_max = float(np.abs(residual).max())
    k.rhs = -residual if cfg.mode == "normalized" else -speed
    k.dtcand = cfg.cfl * h * h * float((bmin / speed).min())

    k.u_min = float(u_min)
    k.u_max = float(u_max)
    k.r_min = math.sqrt(r2.min())
    k.r_max = math.sqrt(r2.max())
    k.ratio = k.r_max / k.r_min
    k.kappa_min = float(1.0 / (b1.max() if b2 is None else np.maximum(b1, b2).max()))
    k.kappa_max = float(1.0 / bmin.min())

    w = grid.weights
    jacw = w * u * bprod / _rpow(r2, n + 1)
    k.mass = float(jacw.sum())
    k.Lr = 0.5 * float(jacw @ np.log(r2))
    k.Flogu = float((w * fv) @ np.log(u))
    if q == 0.0:
        k.Iq = k.mass
        k.J_alpha = k.Flogu - k.Lr
    else:
        k.Iq = float(jacw @ _rpow(r2, q))
        k.J_alpha = k.Flogu - k.Iq / q
    k.J_np1 = k.Flogu - k.Lr
    return k


def _scale_kernel(k: _Kernel, lam: float, grid: SphericalGrid, fv: np.ndarray,
                  cfg: FlowConfig, f_total: float) -> _Kernel:
    """Exact dilation transform of every kernel field under u -> lam*u."""
    n = grid.n
    q = n + 1 - cfg.alpha
    s = _Kernel()
    s.u = lam * k.u
    s.du = lam * k.du
    s.bmin = lam * k.bmin
    s.speed = lam ** (cfg.alpha - n) * k.speed
    residual = s.speed - s.u
    s.residual_max = float(np.max(np.abs(residual)))
    s.rhs = -residual if cfg.mode == "normalized" else -s.speed
    s.dtcand = cfg.cfl * grid.h * grid.h * float(np.min(s.bmin / s.speed))
    s.u_min, s.u_max = lam * k.u_min, lam * k.u_max
    s.r_min, s.r_max = lam * k.r_min, lam * k.r_max
    s.ratio = k.ratio
    s.kappa_min, s.kappa_max = k.kappa_min / lam, k.kappa_max / lam
    log_lam = math.log(lam)
    s.mass = k.mass
    s.Lr = k.Lr + log_lam * k.mass
    s.Flogu = k.Flogu + log_lam * f_total
    if q == 0.0:
        s.Iq = k.mass
        s.J_alpha = s.Flogu - s.Lr
    else:
        s.Iq = lam ** q * k.Iq
        s.J_alpha = s.Flogu - s.Iq / q
    s.J_np1 = s.Flogu - s.Lr
    return s


@dataclass(frozen=True)
class FlowState:
    """One accepted iterate of the flow (a value; stepping never mutates)."""

    t: float
    u: SupportFn
    step_index: int
    dt_last: float
    history: tuple[DiagnosticsRecord, ...]
    worst_J_rise_rate: float = -math.inf
    worst_Jnp1_rise_rate: float = -math.inf
    conserved_target: float | None = None
    _pack: _Kernel | None = field(default=None, repr=False, compare=False)

    def kernel(self, config: FlowConfig) -> _Kernel:
        if self._pack is not None:
            return self._pack
        fv = config.f.values(self.u.grid)
        return _kernel(self.u.u, self.u.grid, fv, config, strict=True)

    def record(self, config: FlowConfig) -> DiagnosticsRecord:
        k = self.kernel(config)
        q = config.q(self.u.grid.n)
        return DiagnosticsRecord(
            t=self.t, J_alpha=k.J_alpha, I_q=k.Iq, log_r_integral=k.Lr,
            u_min=k.u_min, u_max=k.u_max, r_min=k.r_min, r_max=k.r_max,
            ratio_R=k.ratio, residual_max=k.residual_max,
            kappa_min=k.kappa_min, kappa_max=k.kappa_max, dt=self.dt_last,
        )


@dataclass(frozen=True)
class FlowResult:
    final: FlowState
    outcome: Outcome
    collapsed: bool = False
    phi0: float = 1.0

    @property
    def history(self) -> tuple[DiagnosticsRecord, ...]:
        return self.final.history


def select_phi0(r0: RadialFn, f: AnisotropyF, config: FlowConfig) -> float:
    """Initial scale factor for the normalized flow.

    aleksandrov: exp of the mean of log r0 over direction angles.
    bracket:     geometric mean of min and max r0 (any value between the two
                 is admissible for alpha > n+1).
    iq_matching: scale making the q-integral of r0 equal the integral of f.
    explicit:    ``config.phi0_value`` verbatim.
    """
    g = r0.grid
    rule = config.phi0_rule
    if rule == "aleksandrov":
        return float(np.exp(integrate(np.log(r0.r), g) / g.sphere_area))
    if rule == "bracket":
        return float(np.sqrt(np.min(r0.r) * np.max(r0.r)))
    if rule == "iq_matching":
        q = config.q(g.n)
        if q == 0.0:
            raise ValueError("iq_matching requires alpha != n+1")
        f_total = integrate(f.values(g), g)
        return float((integrate(r0.r ** q, g) / f_total) ** (1.0 / q))
    if config.phi0_value is None or config.phi0_value <= 0.0:
        raise ValueError("explicit phi0 rule needs a positive phi0_value")
    return float(config.phi0_value)


def rhs(u: SupportFn, f: AnisotropyF, alpha: float, mode: str = "normalized") -> np.ndarray:
    """Flow velocity of the support function: -f r^alpha K (+ u if normalized)."""
    cfg = FlowConfig(alpha=alpha, f=f, mode=mode)
    k = _kernel(u.u, u.grid, f.values(u.grid), cfg, strict=True)
    return k.rhs


def _projection_factor(k: _Kernel, target: float, q: float) -> float:
    if q == 0.0:
        return math.exp((target - k.Lr) / k.mass)
    return (target / k.Iq) ** (1.0 / q)


def _conservation_target(k: _Kernel, grid: SphericalGrid, fv: np.ndarray,
                         config: FlowConfig, logr0: float | None = None) -> float | None:
    """Pick the conserved integral to pin, if the run qualifies.

    q != 0 with the matching scale rule: the q-integral is pinned to the
    total weight itself (which the discrete stationary equation satisfies
    nodewise), not to the initial value, whose O(h^2) quadrature bias would
    otherwise put the constraint set at a small distance from the stationary
    solution and leave a residual floor.  q = 0 (needs total weight = |S^n|):
    the log integral is pinned to the value the scale rule established
    (``logr0``, exactly zero under the log-mean rule), so that with f = 1
    the pinned limit is exactly the unit sphere; stationary bodies form a
    dilation family there, so any pin is compatible.
    """
    if config.conserve == "off" or config.mode != "normalized":
        return None
    q = config.q(grid.n)
    if q == 0.0:
        f_total = integrate(fv, grid)
        if abs(f_total - grid.sphere_area) <= 1e-9 * grid.sphere_area:
            return k.Lr if logr0 is None else logr0
        return None
    if config.phi0_rule == "iq_matching":
        return float(integrate(fv, grid))
    return None


def step(state: FlowState, config: FlowConfig) -> FlowState:
    """One accepted explicit Euler step (with rejection guard and projection).

    Raises StepCollapse after 40 halvings, which signals genuine
    degeneration (expected only near blowup or extinction).
    """
    grid = state.u.grid
    fv = config.f.values(grid)
    k = state.kernel(config)

    dt = min(k.dtcand, config.t_max - state.t)
    if dt <= 0.0:
        dt = k.dtcand
    k_new = None
    for _ in range(MAX_HALVINGS + 1):
        k_new = _kernel(k.u + dt * k.rhs, grid, fv, config)
        if k_new is not None:
            break
        dt *= 0.5
    if k_new is None:
        raise StepCollapse(f"step rejected {MAX_HALVINGS} times at t={state.t:.6g}")

    if state.conserved_target is not None:
        q = config.q(grid.n)
        lam = _projection_factor(k_new, state.conserved_target, q)
        f_total = float(grid.weights @ fv)
        k_new = _scale_kernel(k_new, lam, grid, fv, config, f_total)
    u_try = k_new.u

    worst_J = state.worst_J_rise_rate
    worst_Jnp1 = state.worst_Jnp1_rise_rate
    if config.mode == "normalized":
        worst_J = max(worst_J, (k_new.J_alpha - k.J_alpha) / dt)
        worst_Jnp1 = max(worst_Jnp1, (k_new.J_np1 - k.J_np1) / dt)

    new_index = state.step_index + 1
    new_state = FlowState(
        t=state.t + dt,
        u=_wrap_support(grid, u_try),
        step_index=new_index,
        dt_last=dt,
        history=state.history,
        worst_J_rise_rate=worst_J,
        worst_Jnp1_rise_rate=worst_Jnp1,
        conserved_target=state.conserved_target,
        _pack=k_new,
    )
    if new_index % config.record_every == 0:
        new_state = replace(new_state, history=state.history + (new_state.record(config),))
    return new_state


def _decide_outcome(state: FlowState, k: _Kernel, config: FlowConfig) -> Outcome | None:
    if k.u_max < config.min_u_floor:
        return Outcome.EXTINCT
    if k.ratio > config.blowup_ratio:
        return Outcome.BLOWUP
    if config.mode == "raw" and k.u_min < config.min_u_floor:
        return Outcome.BLOWUP
    if config.mode == "normalized" and k.residual_max < config.residual_tol:
        return Outcome.CONVERGED
    if state.t >= config.t_max * (1.0 - 1e-12):
        return Outcome.TIMEOUT
    return None


def run(u0: SupportFn, config: FlowConfig, on_step=None) -> FlowResult:
    """Evolve from ``u0`` until convergence, blowup, extinction or t_max.

    In normalized mode ``u0`` is first divided by the scale factor from
    :func:`select_phi0` applied to its radial function.  ``on_step(state)``,
    if given, is invoked after every accepted step.
    """
    grid = u0.grid
    fv = config.f.values(grid)
    phi0 = 1.0
    u_arr = u0.u
    logr0 = None
    if config.mode == "normalized":
        r0 = radial_from_support(u0)
        phi0 = select_phi0(r0, config.f, config)
        u_arr = u0.u / phi0
        logr0 = integrate(np.log(r0.r / phi0), grid)

    k0 = _kernel(u_arr, grid, fv, config, strict=True)
    state = FlowState(
        t=0.0, u=_wrap_support(grid, np.array(u_arr)), step_index=0, dt_last=0.0,
        history=(), conserved_target=_conservation_target(k0, grid, fv, config, logr0),
        _pack=k0,
    )
    state = replace(state, history=(state.record(config),))

    collapsed = False
    while True:
        k = state.kernel(config)
        outcome = _decide_outcome(state, k, config)
        if outcome is not None:
            break
        try:
            state = step(state, config)
        except StepCollapse:
            collapsed = True
            outcome = Outcome.BLOWUP
            break
        if on_step is not None:
            on_step(state)

    if not state.history or state.history[-1].t != state.t:
        state = replace(state, history=state.history + (state.record(config),))
    return FlowResult(final=state, outcome=outcome, collapsed=collapsed, phi0=phi0)


# -- closed-form companions ----------------------------------------------------

def barrier_envelope(a: float, b: float, q: float, t):
    """Inner/outer sphere barriers for alpha > n+1 (q < 0).

    With a = min u(.,0) <= 1 <= b = max u(.,0) after bracket scaling, the
    two spheres

        u1(t) = [1 - (1 - a^q) e^{qt}]^{1/q},
        u2(t) = [1 - (1 - b^q) e^{qt}]^{1/q}

    are exact solutions of the normalized flow enclosing the solution from
    inside and outside; both tend to 1 exponentially.
    """
    if q >= 0.0:
        raise ValueError("barrier envelope needs q < 0")
    if not (a <= 1.0 <= b):
        raise ValueError(f"need a <= 1 <= b, got a={a}, b={b}")
    t = np.asarray(t, dtype=float)
    u1 = (1.0 - (1.0 - a ** q) * np.exp(q * t)) ** (1.0 / q)
    u2 = (1.0 - (1.0 - b ** q) * np.exp(q * t)) ** (1.0 / q)
    return u1, u2


def _subsolution_params(theta_param: float, q: float, n: int, t: float) -> tuple[float, float]:
    if not (q > 0.0):
        raise ValueError("subsolution profile needs q = n+1-alpha > 0")
    if theta_param <= 1.0 / q:
        raise ValueError("need theta_param > 1/q")
    if not (-1.0 < t < 0.0):
        raise ValueError("t must lie in (-1, 0)")
    sigma = (q * theta_param - 1.0) / (n * theta_param)
    return sigma, abs(t)


def subsolution_profile(theta_param: float, q: float, n: int, t: float, rho: float) -> float:
    """Two-branch graph profile of the ratio-blowup barrier at time t.

    Inner branch (rho < |t|^theta): a paraboloid cap of height -|t|^theta;
    outer branch (up to rho = 1): a power-law cup matching the cap to first
    order at the interface.  sigma = (q*theta - 1)/(n*theta).
    """
    sigma, at = _subsolution_params(theta_param, q, n, t)
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    th = theta_param
    if rho < at ** th:
        return -(at ** th) + at ** (th * (sigma - 1.0)) * rho * rho
    return (-(at ** th)
            - (1.0 - sigma) / (1.0 + sigma) * at ** (th * (1.0 + sigma))
            + 2.0 / (1.0 + sigma) * rho ** (1.0 + sigma))


def subsolution_time_derivative(theta_param: float, q: float, n: int, t: float, rho: float) -> float:
    """Vertical speed d(phi)/dt of the profile (t < 0, so d|t|/dt = -1)."""
    sigma, at = _subsolution_params(theta_param, q, n, t)
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    th = theta_param
    if rho < at ** th:
        return th * at ** (th - 1.0) + th * (1.0 - sigma) * at ** (th * (sigma - 1.0) - 1.0) * rho * rho
    return th * at ** (th - 1.0) + (1.0 - sigma) * th * at ** (th * (1.0 + sigma) - 1.0)


@dataclass(frozen=True)
class SubsolutionReport:
    """Measured margins of the blowup barrier inequalities.

    ``inner_margin``: min over inner-branch samples of r^alpha K / |t|^(theta-1)
    (the inequality claims >= 1 there).  ``outer_margin``: the same ratio
    minimized over outer-branch samples, i.e. the measured constant C of the
    outer inequality.  ``c1_defect``: worst value/slope mismatch of the two
    branches at the interface.  ``dphi_dt_max_ratio``: max over samples of
    |d(phi)/dt| / (theta |t|^(theta-1)).
    """

    inner_margin: float
    outer_margin: float
    c1_defect: float
    dphi_dt_max_ratio: float


def verify_subsolution(theta_param: float, q: float, n: int, samples) -> SubsolutionReport:
    """Evaluate r^alpha K and the vertical speed of the barrier graph at samples.

    ``samples`` is an iterable of (rho, t) pairs with t in (-1, 0) and rho in
    [0, 1].  Curvature of the rotational graph is computed from the exact
    branch derivatives:

        K = phi'' (phi'/rho)^(n-1) / (1 + phi'^2)^((n+2)/2).
    """
    alpha = n + 1 - q
    th = theta_param
    inner = math.inf
    outer = math.inf
    dphi_ratio = 0.0
    t_values = set()
    for rho, t in samples:
        sigma, at = _subsolution_params(th, q, n, t)
        t_values.add(t)
        if rho < at ** th:
            amp = at ** (th * (sigma - 1.0))
            dphi = 2.0 * amp * rho
            ddphi = 2.0 * amp
        else:
            dphi = 2.0 * rho ** sigma
            ddphi = 2.0 * sigma * rho ** (sigma - 1.0)
        phi = subsolution_profile(th, q, n, t, rho)
        slope_term = ddphi if rho == 0.0 else dphi / rho
        K = ddphi * slope_term ** (n - 1) / (1.0 + dphi * dphi) ** (0.5 * (n + 2))
        r = math.hypot(rho, phi)
        ratio = r ** alpha * K / at ** (th - 1.0)
        if rho < at ** th:
            inner = min(inner, ratio)
        else:
            outer = min(outer, ratio)
        speed = abs(subsolution_time_derivative(th, q, n, t, rho))
        dphi_ratio = max(dphi_ratio, speed / (th * at ** (th - 1.0)))

    c1 = 0.0
    for t in t_values:
        sigma, at = _subsolution_params(th, q, n, t)
        rho_star = at ** th
        inner_val = -(at ** th) + at ** (th * (sigma - 1.0)) * rho_star ** 2
        outer_val = (-(at ** th)
                     - (1.0 - sigma) / (1.0 + sigma) * at ** (th * (1.0 + sigma))
                     + 2.0 / (1.0 + sigma) * rho_star ** (1.0 + sigma))
        inner_slope = 2.0 * at ** (th * (sigma - 1.0)) * rho_star
        outer_slope = 2.0 * rho_star ** sigma
        c1 = max(c1, abs(inner_val - outer_val), abs(inner_slope - outer_slope))
    return SubsolutionReport(inner_margin=inner, outer_margin=outer,
                             c1_defect=c1, dphi_dt_max_ratio=dphi_ratio)
