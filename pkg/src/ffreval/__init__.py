"""Coverage, rate, and sub-band planning for Strict FFR / SFR cellular
downlinks under a Poisson base-station model, validated against a built-in
Monte-Carlo oracle."""

__version__ = "0.1.0"

from .allocation import AllocationPlan, sfr_allocation, sinr_proportional, strict_allocation
from .coverage import (
    CoverageCurve,
    CoverageQuery,
    ccdf,
    ccdf_closed_form,
    ccdf_ffr_edge,
    ccdf_ffr_interior,
    ccdf_sfr_edge,
    ccdf_sfr_interior,
    coverage_curve,
    pc_general,
    rho,
    rho_closed_alpha4,
    xi_ffr,
    xi_ffr_closed_alpha4,
    xi_sfr,
    xi_sfr_closed_alpha4,
)
from .model import (
    SFR,
    DegenerateRegimeError,
    DownlinkSample,
    Interferer,
    NetworkParams,
    NoReuse,
    ReuseDelta,
    ReuseScheme,
    StrictFFR,
    classify_user,
    db_to_linear,
    effective_interference_factor,
    linear_to_db,
    sinr,
)
from .montecarlo import (
    Deployment,
    DeploymentError,
    SimConfig,
    SumRateResult,
    TrialOutcome,
    estimate_ccdf,
    load_deployment,
    mean_rate,
    sample_deployment,
    sfr_mode_gap,
    simulate,
    simulate_baseline,
    simulate_sfr,
    simulate_strict_ffr,
    sum_rate_experiment,
)
from .quadrature import DEFAULT_SPEC, QuadratureError, QuadratureSpec, integrate_decay
from .rate import RateMcReport, RateQuery, rate_edge, rate_ffr_edge, rate_generic_mc_consistency, rate_sfr_edge
