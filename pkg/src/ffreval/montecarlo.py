"""Monte-Carlo oracle: deployments, per-trial SINR simulation, CCDF and rate
estimation for every reuse scheme.

Each trial owns an independent RNG stream derived from (master seed, trial
index), so results are bit-identical for a given configuration no matter how
trials are split across workers.  The draw order within a trial is fixed:
deployment (PPP only), user position (grid/file only), serving and interferer
fades, scheme-specific activity masks, then -- for reassigned edge users --
the new sub-band, fresh fades, and fresh masks.

A finite deployment can leave a reassigned user with no co-channel interferer
at all; with zero noise that trial's post-SINR is recorded as ``inf`` (the
user is covered at every threshold), an atom the infinite-plane analysis does
not have.  Rate aggregation rejects such outcomes instead of averaging them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal, Optional, Sequence, Union

import numpy as np

from . import allocation as alloc
from .coverage import CoverageCurve
from .model import (
    SFR,
    DegenerateRegimeError,
    NetworkParams,
    NoReuse,
    ReuseDelta,
    ReuseScheme,
    StrictFFR,
    UserClass,
)

InterferenceMode = Literal["effective_eta", "per_bs_exact"]

# Named density presets.  The reference density quoted alongside the 25-BS /
# 10 km^2 grid is roughly ten times the grid's own 2.5e-6 per m^2; both are
# exposed so experiments can pick a self-consistent one.
DENSITY_GRID_25_PER_10KM2 = 25.0 / 10.0e6
DENSITY_REFERENCE = 1.0 / (4000.0 * math.pi**2)

_MIN_EXPECTED_POINTS = 200.0


class DeploymentError(ValueError):
    """Raised for empty, malformed, or out-of-window deployments."""


@dataclass(frozen=True)
class SimConfig:
    """Trial count, seeding, and deployment source for one simulation run."""

    trials: int = 10_000
    seed: int = 0
    window_radius_factor: float = 20.0
    deployment_source: str = "ppp"          # ppp | grid | file
    deployment_path: Optional[str] = None
    grid_count: int = 25
    area: float = 10.0e6                    # m^2

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.window_radius_factor < 10:
            raise ValueError("window_radius_factor must be >= 10")
        if self.deployment_source not in ("ppp", "grid", "file"):
            raise ValueError("deployment_source must be ppp, grid, or file")
        if self.deployment_source == "file" and not self.deployment_path:
            raise ValueError("file deployments need deployment_path")
        if self.deployment_source == "grid":
            side = math.isqrt(self.grid_count)
            if side * side != self.grid_count:
                raise ValueError("grid_count must be a perfect square")
            if not self.area > 0:
                raise ValueError("area must be > 0")


@dataclass(frozen=True)
class Deployment:
    """A finite set of base-station positions inside an axis-aligned window."""

    positions: np.ndarray                   # (N, 2) meters
    window: tuple[float, float, float, float]   # xmin, xmax, ymin, ymax
    source: str

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise DeploymentError("positions must be an (N, 2) array")
        if pos.shape[0] == 0:
            raise DeploymentError("empty deployment")
        xmin, xmax, ymin, ymax = self.window
        if (
            np.any(pos[:, 0] < xmin) or np.any(pos[:, 0] > xmax)
            or np.any(pos[:, 1] < ymin) or np.any(pos[:, 1] > ymax)
        ):
            raise DeploymentError("positions outside the deployment window")


@dataclass(frozen=True)
class TrialOutcome:
    """Pre/post SINR of one simulated user.

    post_sinr is present iff a reassignment occurred (edge user under an FFR
    scheme); baselines and interior users keep their pre-assignment SINR.
    n_retained counts post-assignment co-channel interferers when thinning
    applies.
    """

    pre_sinr: float
    user_class: UserClass
    post_sinr: Optional[float]
    subband: int
    n_interferers: int
    n_retained: Optional[int] = None


def _truncation_bound(params: NetworkParams, radius: float) -> float:
    """Expected out-of-window share of the interference seen from the center.

    Both tails scale like r**(2-alpha); the in-window part is measured from
    the median nearest-serving distance.
    """
    r_med = math.sqrt(math.log(2.0) / (math.pi * params.lam))
    return (r_med / radius) ** (params.alpha - 2.0)


def ppp_window_radius(config: SimConfig, params: NetworkParams) -> float:
    """Simulation disc radius: a multiple of the mean nearest-neighbor
    distance, grown if needed to hold >= 200 expected points."""
    r_factor = config.window_radius_factor / (2.0 * math.sqrt(params.lam))
    r_points = math.sqrt(_MIN_EXPECTED_POINTS / (math.pi * params.lam))
    return max(r_factor, r_points)


def load_deployment(
    path: str,
    window: Optional[tuple[float, float, float, float]] = None,
) -> Deployment:
    """Parse a deployment CSV with header ``id,x_m,y_m``.

    ``#`` comment lines are ignored; rows outside an explicitly supplied
    window are a DeploymentError, never silently clipped.  Without a window
    the bounding box of the positions is used.
    """
    rows: list[tuple[float, float]] = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            header_seen = False
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if not header_seen:
                    cols = [c.strip().lower() for c in line.split(",")]
                    if cols != ["id", "x_m", "y_m"]:
                        raise DeploymentError(
                            f"{path}:{lineno}: expected header 'id,x_m,y_m', got {line!r}"
                        )
                    header_seen = True
                    continue
                parts = line.split(",")
                if len(parts) != 3:
                    raise DeploymentError(f"{path}:{lineno}: expected 3 columns, got {line!r}")
                try:
                    rows.append((float(parts[1]), float(parts[2])))
                except ValueError as exc:
                    raise DeploymentError(f"{path}:{lineno}: bad coordinate in {line!r}") from exc
    except OSError as exc:
        raise DeploymentError(f"cannot read deployment file {path!r}: {exc}") from exc

    if not rows:
        raise DeploymentError(f"{path}: no base stations found")
    pos = np.asarray(rows, dtype=float)
    if window is None:
        window = (
            float(pos[:, 0].min()), float(pos[:, 0].max()),
            float(pos[:, 1].min()), float(pos[:, 1].max()),
        )
    return Deployment(pos, window, "file")


def sample_deployment(
    config: SimConfig,
    params: NetworkParams,
    rng: Optional[np.random.Generator] = None,
) -> Deployment:
    """Draw (ppp) or build (grid/file) one deployment.

    PPP deployments put Poisson(lam * area) points uniformly in a disc
    centered on the typical user; an empty draw is a DeploymentError.
    """
    if config.deployment_source == "ppp":
        if rng is None:
            rng = np.random.default_rng(config.seed)
        radius = ppp_window_radius(config, params)
        n = rng.poisson(params.lam * math.pi * radius * radius)
        if n == 0:
            raise DeploymentError("empty deployment: Poisson draw returned no points")
        r = radius * np.sqrt(rng.random(n))
        theta = 2.0 * math.pi * rng.random(n)
        pos = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
        return Deployment(pos, (-radius, radius, -radius, radius), "ppp")

    if config.deployment_source == "grid":
        side = math.isqrt(config.grid_count)
        extent = math.sqrt(config.area)
        spacing = extent / side
        coords = (np.arange(side) + 0.5) * spacing - extent / 2.0
        xx, yy = np.meshgrid(coords, coords)
        pos = np.column_stack([xx.ravel(), yy.ravel()])
        half = extent / 2.0
        return Deployment(pos, (-half, half, -half, half), "grid")

    return load_deployment(config.deployment_path)


def grid_spacing(config: SimConfig) -> float:
    """Lattice spacing of the grid deployment (meters)."""
    return math.sqrt(config.area) / math.isqrt(config.grid_count)


# --- per-trial simulation ----------------------------------------------------


def _trial_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, index))))


def _user_position(deployment: Deployment, config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Per-trial user drop for fixed deployments (the PPP case re-centers the
    process on the user instead and draws nothing here)."""
    xmin, xmax, ymin, ymax = deployment.window
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    if deployment.source == "grid":
        half = 0.5 * grid_spacing(config)          # the central cell
    else:
        half_x = 0.25 * (xmax - xmin)              # central quarter of the window
        half_y = 0.25 * (ymax - ymin)
        u = rng.random(2)
        return np.array([cx + (2 * u[0] - 1) * half_x, cy + (2 * u[1] - 1) * half_y])
    u = rng.random(2)
    return np.array([cx + (2 * u[0] - 1) * half, cy + (2 * u[1] - 1) * half])


def _simulate_range(
    config: SimConfig,
    params: NetworkParams,
    mode: str,
    interference_mode: InterferenceMode,
    start: int,
    stop: int,
) -> list[TrialOutcome]:
    alpha = params.alpha
    sigma2 = params.sigma2
    p = params.power
    mu = params.mu
    delta = params.delta
    beta = params.beta
    t_ffr = params.t_ffr
    eta = params.eta()
    fade_mean = 1.0 / mu

    fixed = None
    if config.deployment_source != "ppp":
        fixed = sample_deployment(config, params)

    outcomes: list[TrialOutcome] = []
    for i in range(start, stop):
        rng = _trial_rng(config.seed, i)

        if fixed is None:
            dep = sample_deployment(config, params, rng)
            d = np.hypot(dep.positions[:, 0], dep.positions[:, 1])
        else:
            user = _user_position(fixed, config, rng)
            d = np.hypot(fixed.positions[:, 0] - user[0], fixed.positions[:, 1] - user[1])

        n = d.size
        if n < 2 and sigma2 == 0.0:
            raise DegenerateRegimeError(
                "deployment leaves the user without interferers under zero noise"
            )
        k = int(np.argmin(d))
        r = float(d[k])
        if r == 0.0:
            r = 1e-9  # user exactly on a site; keep the path loss finite
        di = np.delete(d, k)
        ti = di ** (-alpha)

        g_y = rng.exponential(fade_mean)
        g_z = rng.exponential(fade_mean, n - 1)
        signal = p * g_y * r ** (-alpha)

        n_retained: Optional[int] = None
        if mode == "strict_ffr" or mode == "no_reuse":
            interference = p * float(np.dot(g_z, ti))
        elif mode == "reuse_delta":
            keep = rng.random(n - 1) < 1.0 / delta
            n_retained = int(keep.sum())
            interference = p * float(np.dot(g_z * keep, ti))
        elif mode == "sfr":
            # At beta = 1 both interference models are the identical uniform-power
            # field; skipping the class draw keeps their RNG streams aligned.
            if interference_mode == "per_bs_exact" and beta != 1.0:
                w = np.where(rng.random(n - 1) < 1.0 / delta, beta, 1.0)
                interference = p * float(np.dot(g_z * w, ti))
            else:
                interference = eta * p * float(np.dot(g_z, ti))
        else:
            raise ValueError(f"unknown mode {mode!r}")

        denom = sigma2 + interference
        pre = signal / denom if denom > 0.0 else math.inf
        user_class: UserClass = "edge" if pre < t_ffr else "interior"

        post: Optional[float] = None
        subband = 0
        if user_class == "edge" and mode == "strict_ffr":
            subband = int(rng.integers(1, delta + 1))
            g_y2 = rng.exponential(fade_mean)
            g_z2 = rng.exponential(fade_mean, n - 1)
            keep = rng.random(n - 1) < 1.0 / delta
            n_retained = int(keep.sum())
            inter2 = p * float(np.dot(g_z2 * keep, ti))
            denom2 = sigma2 + inter2
            post = p * g_y2 * r ** (-alpha) / denom2 if denom2 > 0.0 else math.inf
        elif user_class == "edge" and mode == "sfr":
            subband = int(rng.integers(1, delta + 1))
            g_y2 = rng.exponential(fade_mean)
            g_z2 = rng.exponential(fade_mean, n - 1)
            if interference_mode == "per_bs_exact" and beta != 1.0:
                w2 = np.where(rng.random(n - 1) < 1.0 / delta, beta, 1.0)
                inter2 = p * float(np.dot(g_z2 * w2, ti))
            else:
                inter2 = eta * p * float(np.dot(g_z2, ti))
            denom2 = sigma2 + inter2
            post = beta * p * g_y2 * r ** (-alpha) / denom2 if denom2 > 0.0 else math.inf

        outcomes.append(
            TrialOutcome(pre, user_class, post, subband, n - 1, n_retained)
        )
    return outcomes


def _worker(args) -> list[TrialOutcome]:
    return _simulate_range(*args)


def _resolve_workers(workers: Optional[int]) -> int:
    cap = os.environ.get("FFREVAL_THREADS")
    cap_n = int(cap) if cap else None
    if workers is None:
        workers = cap_n if cap_n else 1
    if cap_n:
        workers = min(workers, cap_n)
    return max(1, workers)


def _run(
    config: SimConfig,
    params: NetworkParams,
    mode: str,
    interference_mode: InterferenceMode = "effective_eta",
    workers: Optional[int] = None,
) -> list[TrialOutcome]:
    workers = _resolve_workers(workers)
    if workers == 1 or config.trials < 2 * workers:
        return _simulate_range(config, params, mode, interference_mode, 0, config.trials)
    bounds = np.linspace(0, config.trials, workers + 1, dtype=int)
    jobs = [
        (config, params, mode, interference_mode, int(a), int(b))
        for a, b in zip(bounds[:-1], bounds[1:])
    ]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        chunks = list(pool.map(_worker, jobs))
    return [o for chunk in chunks for o in chunk]


def simulate_strict_ffr(
    config: SimConfig,
    params: NetworkParams,
    workers: Optional[int] = None,
) -> list[TrialOutcome]:
    """Simulate Strict FFR: classification on the common band, then edge users
    are re-faded on a fresh edge band whose interferers survive thinning 1/delta."""
    return _run(config, params, "strict_ffr", workers=workers)


def simulate_sfr(
    config: SimConfig,
    params: NetworkParams,
    interference_mode: InterferenceMode = "effective_eta",
    workers: Optional[int] = None,
) -> list[TrialOutcome]:
    """Simulate SFR under the consolidated-eta or exact per-BS power model."""
    if interference_mode not in ("effective_eta", "per_bs_exact"):
        raise ValueError("interference_mode must be 'effective_eta' or 'per_bs_exact'")
    return _run(config, params, "sfr", interference_mode, workers)


def simulate_baseline(
    config: SimConfig,
    params: NetworkParams,
    scheme: Union[NoReuse, ReuseDelta],
    workers: Optional[int] = None,
) -> list[TrialOutcome]:
    """Simulate universal reuse or classical reuse-delta (no reassignment)."""
    if isinstance(scheme, NoReuse):
        return _run(config, params, "no_reuse", workers=workers)
    if isinstance(scheme, ReuseDelta):
        return _run(config, replace(params, delta=scheme.delta), "reuse_delta", workers=workers)
    raise ValueError("scheme must be NoReuse or ReuseDelta")


def simulate(
    config: SimConfig,
    params: NetworkParams,
    scheme: ReuseScheme,
    interference_mode: InterferenceMode = "effective_eta",
    workers: Optional[int] = None,
) -> list[TrialOutcome]:
    """Dispatch to the scheme-matching simulator, aligning scheme parameters."""
    if isinstance(scheme, StrictFFR):
        p = replace(params, delta=scheme.delta, t_ffr=scheme.t_ffr)
        return simulate_strict_ffr(config, p, workers)
    if isinstance(scheme, SFR):
        p = replace(params, delta=scheme.delta, beta=scheme.beta, t_ffr=scheme.t_ffr)
        return simulate_sfr(config, p, interference_mode, workers)
    return simulate_baseline(config, params, scheme, workers)


# --- estimation --------------------------------------------------------------


def effective_sinr(outcome: TrialOutcome) -> float:
    """Post-assignment SINR when one exists, else the pre-assignment SINR."""
    return outcome.post_sinr if outcome.post_sinr is not None else outcome.pre_sinr


def _conditioned_values(
    outcomes: Sequence[TrialOutcome],
    conditioning: Literal["edge", "interior", "all"],
) -> np.ndarray:
    if conditioning == "all":
        picked = outcomes
    else:
        picked = [o for o in outcomes if o.user_class == conditioning]
    if not picked:
        raise DegenerateRegimeError(f"no outcomes after conditioning on {conditioning!r}")
    return np.array([effective_sinr(o) for o in picked])


def estimate_ccdf(
    outcomes: Sequence[TrialOutcome],
    t_grid: Sequence[float],
    conditioning: Literal["edge", "interior", "all"] = "all",
) -> CoverageCurve:
    """Empirical conditioned CCDF with 3-sigma binomial half-widths.

    Degenerate extremes (empirical probability exactly 0 or 1) fall back to
    the Wilson interval so the half-width never collapses to zero.
    """
    values = _conditioned_values(outcomes, conditioning)
    n = values.size
    t = np.asarray(t_grid, dtype=float)
    p_hat = np.array([(values > ti).mean() for ti in t])

    z = 3.0
    hw = z * np.sqrt(p_hat * (1.0 - p_hat) / n)
    extreme = (p_hat <= 0.0) | (p_hat >= 1.0)
    if extreme.any():
        wilson = (z * np.sqrt(p_hat * (1 - p_hat) / n + z**2 / (4 * n**2))) / (1 + z**2 / n)
        hw = np.where(extreme, wilson, hw)
    return CoverageCurve(t, p_hat, hw, provenance="mc")


def edge_fraction(outcomes: Sequence[TrialOutcome]) -> float:
    classes = np.array([o.user_class == "edge" for o in outcomes])
    return float(classes.mean())


def mean_rate(
    outcomes: Sequence[TrialOutcome],
    conditioning: Literal["edge", "interior", "all"] = "all",
) -> tuple[float, float]:
    """Mean ln(1 + SINR) over the conditioned outcomes and its 3-sigma
    half-width; infinite SINR atoms (finite deployments, zero noise) are a
    degenerate-regime error here."""
    values = _conditioned_values(outcomes, conditioning)
    if np.isinf(values).any():
        raise DegenerateRegimeError(
            "unbounded SINR atom in rate aggregation (finite deployment, zero noise)"
        )
    rates = np.log1p(values)
    half = 3.0 * float(rates.std(ddof=1)) / math.sqrt(rates.size) if rates.size > 1 else math.inf
    return float(rates.mean()), half


@dataclass(frozen=True)
class SumRateResult:
    """Per-cell sum rate split into its class components (nats/Hz)."""

    sum_rate: float
    edge_rate: float
    interior_rate: float


def sum_rate_experiment(
    config: SimConfig,
    params: NetworkParams,
    scheme: ReuseScheme,
    n_band: int,
    n_edge: int,
    interference_mode: InterferenceMode = "effective_eta",
    workers: Optional[int] = None,
    outcomes: Optional[Sequence[TrialOutcome]] = None,
) -> SumRateResult:
    """Per-cell sum rate under the scheme's sub-band accounting.

    Strict FFR reserves delta * n_edge sub-bands for the edge reuse pattern
    (n_int = n_band - delta * n_edge); SFR reuses everything
    (n_int = n_band - n_edge).  Baselines ignore n_edge: universal reuse
    transmits all n_band sub-bands and reuse-delta n_band / delta, both at the
    unconditioned mean rate.  Pass precomputed ``outcomes`` to reuse one
    simulation across an allocation sweep.
    """
    if outcomes is None:
        outcomes = simulate(config, params, scheme, interference_mode, workers)

    if isinstance(scheme, (NoReuse, ReuseDelta)):
        r_all, _ = mean_rate(outcomes, "all")
        bands = n_band if isinstance(scheme, NoReuse) else n_band / scheme.delta
        r_edge = r_int = math.nan
        try:
            r_edge, _ = mean_rate(outcomes, "edge")
            r_int, _ = mean_rate(outcomes, "interior")
        except DegenerateRegimeError:
            pass  # a baseline sweep does not need both classes populated
        return SumRateResult(bands * r_all, r_edge, r_int)

    if isinstance(scheme, StrictFFR):
        plan = alloc.strict_allocation(n_band, n_band - scheme.delta * n_edge, scheme.delta)
    else:
        plan = alloc.sfr_allocation(n_band, n_edge, scheme.delta)
    if plan.n_edge != n_edge:
        raise ValueError(f"n_edge={n_edge} is not feasible for {scheme!r} with n_band={n_band}")

    def class_rate(which: Literal["edge", "interior"], needed: bool) -> float:
        try:
            value, _ = mean_rate(outcomes, which)
            return value
        except DegenerateRegimeError:
            if needed:
                raise
            return math.nan

    r_int = class_rate("interior", plan.n_int > 0)
    r_edge = class_rate("edge", plan.n_edge > 0)
    total = (plan.n_int * r_int if plan.n_int else 0.0) + (
        plan.n_edge * r_edge if plan.n_edge else 0.0
    )
    return SumRateResult(total, r_edge, r_int)


def sfr_mode_gap(
    config: SimConfig,
    params: NetworkParams,
    t_grid: Sequence[float],
    workers: Optional[int] = None,
) -> float:
    """Largest edge-CCDF gap between the consolidated-eta and exact per-BS
    interference models over the grid; reported, never pass/fail."""
    eff = estimate_ccdf(
        simulate_sfr(config, params, "effective_eta", workers), t_grid, "edge"
    )
    exact = estimate_ccdf(
        simulate_sfr(config, params, "per_bs_exact", workers), t_grid, "edge"
    )
    return float(np.max(np.abs(eff.value - exact.value)))
