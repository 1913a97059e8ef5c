"""Contracting Gauss-curvature-type flows of convex bodies, at desk scale.

The package simulates the anisotropic contracting flow with normal speed
``f * r^alpha * K`` (and its normalized variant) for closed convex curves
and axisymmetric convex surfaces, represented by support functions on a
uniform angular grid.  Alongside the evolution engine it provides the
convex-body calculus (support/radial conversions, curvature, polar
duality), the monotone and conserved functionals of the flow, admissibility
checks for the prescribed-curvature data, and independent brute-force
oracles used by the test suite.
"""

from .errors import ConfigError, ConvexityLost, StepCollapse
from .grid import SphericalGrid, circle_grid, deriv1, deriv2, integrate, polar_grid
from .geometry import (
    BodySnapshot,
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
from .functionals import (
    AleksandrovReport,
    AnisotropyF,
    FunctionalReport,
    aleksandrov_check,
    constant_f,
    cosine_f,
    dual_curvature_measure,
    functional_J,
    functional_report,
    integral_I_q,
    report_csv_header,
    report_csv_row,
    soliton_residual,
    spike_f,
    tabulated_f,
)
from .flow import (
    DiagnosticsRecord,
    FlowConfig,
    FlowResult,
    FlowState,
    Outcome,
    barrier_envelope,
    rhs,
    run,
    select_phi0,
    step,
    subsolution_profile,
    subsolution_time_derivative,
    verify_subsolution,
)

__version__ = "0.1.0"
