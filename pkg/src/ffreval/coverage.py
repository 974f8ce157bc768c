"""Analytic SINR coverage (CCDF) expressions for FFR downlinks.

The building blocks are two interference kernels evaluated by quadrature:

* ``rho`` -- the unconditioned interference tail integral behind the baseline
  coverage probability ``pc_general``;
* ``xi_ffr`` / ``xi_sfr`` -- joint kernels coupling a user's SINR before and
  after a sub-band reassignment, through the shared base-station geometry.

Conditional edge/interior CCDFs are ratios of these.  Under no noise and
alpha = 4 every kernel also has an exact arctan form (``ccdf_closed_form``),
obtained by partial fractions of the kernel integrands; the quadrature path
is the reference and the closed forms are checked against it in the tests.

All thresholds are linear.  With sigma2 = 0 the distance integrals collapse
analytically, which makes every CCDF independent of the density ``lam``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .model import (
    SFR,
    DegenerateRegimeError,
    NetworkParams,
    NoReuse,
    ReuseDelta,
    ReuseScheme,
    StrictFFR,
    UserClass,
    effective_interference_factor,
)
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_decay

Denominator = Literal["appendix", "theorem"]

# Tolerance for switching the closed forms onto their limit branch, where the
# generic expressions become 0/0.
_LIMIT_BRANCH_RTOL = 1e-6

_DEGENERATE_DENOMINATOR = 1e-12


@dataclass(frozen=True)
class CoverageQuery:
    """One CCDF evaluation point: threshold, parameters, scheme, user class."""

    t: float
    params: NetworkParams
    scheme: ReuseScheme
    user_class: UserClass = "interior"

    def __post_init__(self) -> None:
        if not self.t > 0:
            raise ValueError("threshold t must be > 0")
        if isinstance(self.scheme, (NoReuse, ReuseDelta)) and self.user_class == "edge":
            raise ValueError("baseline schemes have no interior/edge split")


@dataclass(frozen=True)
class CoverageCurve:
    """Ordered CCDF samples with optional Monte-Carlo confidence half-widths."""

    t: np.ndarray
    value: np.ndarray
    half_width: Optional[np.ndarray] = None
    provenance: str = "analytic"

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        v = np.asarray(self.value, dtype=float)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "value", v)
        if self.half_width is not None:
            object.__setattr__(self, "half_width", np.asarray(self.half_width, dtype=float))
        if t.shape != v.shape:
            raise ValueError("t and value must have the same shape")
        if np.any(np.diff(t) <= 0):
            raise ValueError("thresholds must be strictly increasing")
        if self.provenance not in ("analytic", "mc"):
            raise ValueError("provenance must be 'analytic' or 'mc'")

    def check(self) -> None:
        """Assert CCDF range and monotonicity (up to half-width slack for MC)."""
        slack = np.zeros_like(self.value) if self.half_width is None else self.half_width
        if np.any(self.value < -1e-12) or np.any(self.value > 1 + 1e-12):
            raise ValueError("CCDF values must lie in [0, 1]")
        rises = np.diff(self.value) - (slack[1:] + slack[:-1])
        if np.any(rises > 1e-12):
            raise ValueError("CCDF must be non-increasing in the threshold")


# --- kernels -----------------------------------------------------------------


def rho(t: float, alpha: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Unconditioned interference tail kernel, by quadrature.

    rho(t, alpha) = t**(2/alpha) * integral_{t**(-2/alpha)}^inf du / (1 + u**(alpha/2))
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    if not alpha > 2:
        raise ValueError("alpha must be > 2")
    lower = t ** (-2.0 / alpha)
    half = alpha / 2.0
    val, _ = integrate_decay(lambda u: 1.0 / (1.0 + u**half), lower, spec)
    return t ** (2.0 / alpha) * val


def rho_closed_alpha4(t: float) -> float:
    """Exact arctan form of ``rho`` at alpha = 4."""
    s = math.sqrt(t)
    return s * (math.pi / 2.0 - math.atan(1.0 / s))


def xi_ffr(
    t: float,
    t_ffr: float,
    alpha: float,
    delta: int,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Joint pre/post interference kernel for a reassigned Strict FFR edge user.

    The pre-assignment factor sees every base station; the post-assignment
    factor sees each one with probability 1/delta (the chance it transmits on
    the user's new edge band).
    """
    if not (t > 0 and t_ffr > 0):
        raise ValueError("thresholds must be > 0")
    a, b = t_ffr, t

    def integrand(x: np.ndarray) -> np.ndarray:
        # Rational form of 1 - [1 - (1 - 1/(1+b*u))/delta] / (1+a*u); the
        # direct difference cancels catastrophically in the far tail.
        u = x ** (-alpha)
        numer = u * (delta * a + b + delta * a * b * u)
        return numer / (delta * (1.0 + a * u) * (1.0 + b * u)) * x

    val, _ = integrate_decay(integrand, 1.0, spec)
    return val


def xi_sfr(
    t: float,
    t_ffr: float,
    alpha: float,
    beta: float,
    eta: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Joint pre/post interference kernel for a reassigned SFR edge user.

    Both factors see every base station (all cells reuse all sub-bands); the
    effective thresholds are eta*t_ffr before and eta*t/beta after the power
    boost.
    """
    if not (t > 0 and t_ffr > 0):
        raise ValueError("thresholds must be > 0")
    a = eta * t_ffr
    b = eta * t / beta

    def integrand(x: np.ndarray) -> np.ndarray:
        # Rational form of 1 - 1/((1+a*u)(1+b*u)), cancellation-free in the tail.
        u = x ** (-alpha)
        return u * (a + b + a * b * u) / ((1.0 + a * u) * (1.0 + b * u)) * x

    val, _ = integrate_decay(integrand, 1.0, spec)
    return val


def xi_ffr_closed_alpha4(t: float, t_ffr: float, delta: int) -> float:
    """Exact arctan form of ``xi_ffr`` at alpha = 4.

    Partial fractions of the kernel give coefficients with a removable
    singularity at t = t_ffr; the limit branch is used near that point.
    """
    a, b = t_ffr, t
    if abs(b - a) <= _LIMIT_BRANCH_RTOL * a:
        r = rho_closed_alpha4(a)
        return r * (2 * delta + 1) / (4 * delta) + a / (4 * delta * (a + 1))
    fa = rho_closed_alpha4(a) / a
    fb = rho_closed_alpha4(b) / b
    coef_a = a * (delta * b - delta * a - b) / (b - a)
    coef_b = b * b / (b - a)
    return (coef_a * fa + coef_b * fb) / (2 * delta)


def xi_sfr_closed_alpha4(t: float, t_ffr: float, beta: float, eta: float) -> float:
    """Exact arctan form of ``xi_sfr`` at alpha = 4.

    The generic form is singular where the two effective thresholds meet
    (t = beta * t_ffr); the limit branch covers that point, which at beta = 1
    is simply t = t_ffr.
    """
    a = eta * t_ffr
    b = eta * t / beta
    if abs(b - a) <= _LIMIT_BRANCH_RTOL * max(a, b):
        c = 0.5 * (a + b)
        return 0.75 * rho_closed_alpha4(c) + c / (4.0 * (c + 1.0))
    ra = rho_closed_alpha4(a)
    rb = rho_closed_alpha4(b)
    return (a * ra - b * rb) / (2.0 * (a - b))


# --- baseline coverage -------------------------------------------------------


def _distance_integral(
    params: NetworkParams,
    kernel: float,
    noise_coef: float,
    spec: QuadratureSpec,
) -> float:
    """pi*lam * integral_0^inf exp(-pi*lam*v*kernel - noise_coef * v^(alpha/2)) dv.

    With zero noise this collapses to 1/kernel; otherwise the integral is
    evaluated in the rescaled variable w = pi*lam*v.
    """
    if noise_coef == 0.0:
        return 1.0 / kernel
    scale = math.pi * params.lam

    def integrand(w: np.ndarray) -> np.ndarray:
        return np.exp(-w * kernel - noise_coef * (w / scale) ** (params.alpha / 2.0))

    val, _ = integrate_decay(integrand, 0.0, spec)
    return val


def pc_general(
    t: float,
    params: NetworkParams,
    delta_bands: int = 1,
    spec: QuadratureSpec = DEFAULT_SPEC,
) -> float:
    """Coverage probability of a typical user when interferers occupy the
    user's band with probability 1/delta_bands.

    delta_bands = 1 is universal reuse; larger values model classical
    reuse-delta via interferer thinning.
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    kernel = 1.0 + rho(t, params.alpha, spec) / delta_bands
    noise_coef = params.mu * t * params.sigma2 / params.power
    return _distance_integral(params, kernel, noise_coef, spec)


# --- conditional CCDFs -------------------------------------------------------


def _require(query: CoverageQuery, scheme_type: type, user_class: UserClass) -> None:
    if not isinstance(query.scheme, scheme_type):
        raise ValueError(f"query.scheme must be {scheme_type.__name__}")
    if query.user_class != user_class:
        raise ValueError(f"query.user_class must be {user_class!r}")


def ccdf_ffr_edge(query: CoverageQuery, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """CCDF of a Strict FFR edge user's SINR after its edge-band reassignment,
    conditioned on the pre-assignment SINR being below the threshold."""
    _require(query, StrictFFR, "edge")
    p = query.params
    t, t_ffr, delta = query.t, query.scheme.t_ffr, query.scheme.delta

    unconditioned = pc_general(t, p, delta, spec)
    kernel = 1.0 + 2.0 * xi_ffr(t, t_ffr, p.alpha, delta, spec)
    noise_coef = p.mu * (t + t_ffr) * p.sigma2 / p.power
    joint = _distance_integral(p, kernel, noise_coef, spec)

    denom = 1.0 - pc_general(t_ffr, p, 1, spec)
    if denom < _DEGENERATE_DENOMINATOR:
        raise DegenerateRegimeError(
            "classification threshold leaves (almost) no edge users"
        )
    return (unconditioned - joint) / denom


def ccdf_ffr_interior(query: CoverageQuery, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """CCDF of a Strict FFR interior user's SINR on the common band,
    conditioned on it exceeding the classification threshold."""
    _require(query, StrictFFR, "interior")
    p = query.params
    t_ffr = query.scheme.t_ffr
    if query.t <= t_ffr:
        return 1.0
    return pc_general(query.t, p, 1, spec) / pc_general(t_ffr, p, 1, spec)


def ccdf_sfr_edge(
    query: CoverageQuery,
    spec: QuadratureSpec = DEFAULT_SPEC,
    denominator: Denominator = "appendix",
) -> float:
    """CCDF of an SFR edge user's SINR after its boosted reassignment,
    conditioned on the pre-assignment SINR being below the threshold.

    ``denominator`` selects the conditioning mass: "appendix" (default) uses
    1 - pc_general(eta * t_ffr, 1), which matches the derivation of the
    numerator and the Monte-Carlo oracle; "theorem" uses the alternative
    1 - pc_general(t_ffr, delta) statement, kept reachable for comparison.
    """
    _require(query, SFR, "edge")
    p = query.params
    scheme: SFR = query.scheme
    t, t_ffr, delta, beta = query.t, scheme.t_ffr, scheme.delta, scheme.beta
    eta = (delta - 1 + beta) / delta

    unconditioned = pc_general(eta * t / beta, p, 1, spec)
    kernel = 1.0 + 2.0 * xi_sfr(t, t_ffr, p.alpha, beta, eta, spec)
    noise_coef = p.mu * (t / beta + t_ffr) * p.sigma2 / p.power
    joint = _distance_integral(p, kernel, noise_coef, spec)

    if denominator == "appendix":
        denom = 1.0 - pc_general(eta * t_ffr, p, 1, spec)
    elif denominator == "theorem":
        denom = 1.0 - pc_general(t_ffr, p, delta, spec)
    else:
        raise ValueError("denominator must be 'appendix' or 'theorem'")
    if denom < _DEGENERATE_DENOMINATOR:
        raise DegenerateRegimeError(
            "classification threshold leaves (almost) no edge users"
        )
    return (unconditioned - joint) / denom


def ccdf_sfr_interior(query: CoverageQuery, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """CCDF of an SFR interior user's SINR, conditioned on it exceeding the
    classification threshold; interference carries the eta consolidation."""
    _require(query, SFR, "interior")
    p = query.params
    scheme: SFR = query.scheme
    eta = (scheme.delta - 1 + scheme.beta) / scheme.delta
    if query.t <= scheme.t_ffr:
        return 1.0
    num = pc_general(eta * query.t, p, 1, spec)
    den = pc_general(eta * scheme.t_ffr, p, 1, spec)
    return num / den


def ccdf_closed_form(query: CoverageQuery) -> float:
    """Exact no-noise, alpha = 4 edge-user CCDF via the arctan kernel forms.

    Requires sigma2 = 0 and alpha = 4 exactly, an edge user, and a Strict FFR
    or SFR scheme; the limit branches cover the points where the generic
    coefficients are indeterminate.
    """
    p = query.params
    if p.sigma2 != 0.0 or p.alpha != 4.0:
        raise ValueError("closed forms require sigma2 = 0 and alpha = 4")
    if query.user_class != "edge":
        raise ValueError("closed forms cover edge users only")

    t = query.t
    if isinstance(query.scheme, StrictFFR):
        t_ffr, delta = query.scheme.t_ffr, query.scheme.delta
        rho_r = rho_closed_alpha4(t_ffr)
        xi = xi_ffr_closed_alpha4(t, t_ffr, delta)
        pre = (1.0 + rho_r) / rho_r
        return pre * (1.0 / (1.0 + rho_closed_alpha4(t) / delta) - 1.0 / (1.0 + 2.0 * xi))
    if isinstance(query.scheme, SFR):
        t_ffr, delta, beta = query.scheme.t_ffr, query.scheme.delta, query.scheme.beta
        eta = (delta - 1 + beta) / delta
        rho_r = rho_closed_alpha4(eta * t_ffr)
        xi = xi_sfr_closed_alpha4(t, t_ffr, beta, eta)
        pre = (1.0 + rho_r) / rho_r
        return pre * (1.0 / (1.0 + rho_closed_alpha4(eta * t / beta)) - 1.0 / (1.0 + 2.0 * xi))
    raise ValueError("closed forms cover StrictFFR and SFR schemes only")


def ccdf(
    query: CoverageQuery,
    spec: QuadratureSpec = DEFAULT_SPEC,
    denominator: Denominator = "appendix",
) -> float:
    """Dispatch a coverage query to the matching analytic expression."""
    scheme = query.scheme
    if isinstance(scheme, NoReuse):
        return pc_general(query.t, query.params, 1, spec)
    if isinstance(scheme, ReuseDelta):
        return pc_general(query.t, query.params, scheme.delta, spec)
    if isinstance(scheme, StrictFFR):
        if query.user_class == "edge":
            return ccdf_ffr_edge(query, spec)
        return ccdf_ffr_interior(query, spec)
    if query.user_class == "edge":
        return ccdf_sfr_edge(query, spec, denominator)
    return ccdf_sfr_interior(query, spec)


def coverage_curve(
    t_grid: Sequence[float],
    params: NetworkParams,
    scheme: ReuseScheme,
    user_class: UserClass = "interior",
    spec: QuadratureSpec = DEFAULT_SPEC,
    denominator: Denominator = "appendix",
) -> CoverageCurve:
    """Evaluate the analytic CCDF over an increasing threshold grid."""
    values = [
        ccdf(CoverageQuery(t, params, scheme, user_class), spec, denominator)
        for t in t_grid
    ]
    return CoverageCurve(np.asarray(t_grid, float), np.asarray(values), provenance="analytic")
