"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line
with the measured quantities at the stated tolerances.

Monte-Carlo scales follow the criteria (1e5 trials where stated, fixed
seeds).  Criteria whose stated tolerances are not met by the model itself are
asserted as stated anyway; their failure output carries the measured values.
Run with ``pytest tests/test_acceptance.py -v -s`` to stream the lines.
"""

import math
import time
from dataclasses import dataclass

import numpy as np
import pytest

from ffreval.allocation import sinr_proportional
from ffreval.cli import main as cli_main
from ffreval.coverage import (
    CoverageQuery,
    ccdf_closed_form,
    ccdf_ffr_edge,
    ccdf_ffr_interior,
    ccdf_sfr_edge,
    ccdf_sfr_interior,
    coverage_curve,
    pc_general,
)
from ffreval.model import SFR, NetworkParams, NoReuse, ReuseDelta, StrictFFR
from ffreval.montecarlo import (
    SimConfig,
    estimate_ccdf,
    simulate_baseline,
    simulate_sfr,
    simulate_strict_ffr,
    sum_rate_experiment,
)
from ffreval.rate import RateQuery, rate_ffr_edge, rate_sfr_edge

T_FFR_1DB = 10 ** 0.1
GRID_DB = np.arange(-10.0, 20.5, 1.0)            # 31 points
GRID = [10 ** (d / 10) for d in GRID_DB]
REF = NetworkParams(t_ffr=T_FFR_1DB)             # no noise, delta=3, alpha=4
REF_B4 = NetworkParams(beta=4.0, t_ffr=T_FFR_1DB)
STRICT = StrictFFR(3, T_FFR_1DB)
SFR_B4 = SFR(3, 4.0, T_FFR_1DB)


def announce(criterion: int, ok: bool, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")


@dataclass
class RefSims:
    strict: list
    sfr4: list
    noreuse: list
    reuse3: list
    elapsed: float


@pytest.fixture(scope="module")
def ref_sims() -> RefSims:
    config = SimConfig(trials=100_000, seed=20_250_808)
    t0 = time.monotonic()
    strict = simulate_strict_ffr(config, REF)
    sfr4 = simulate_sfr(config, REF_B4, "effective_eta")
    noreuse = simulate_baseline(config, REF, NoReuse())
    reuse3 = simulate_baseline(config, REF, ReuseDelta(3))
    return RefSims(strict, sfr4, noreuse, reuse3, time.monotonic() - t0)


def _analytic(fn, params, scheme, klass):
    return [fn(CoverageQuery(t, params, scheme, klass)) for t in GRID]


def test_criterion_1_analytic_vs_oracle(ref_sims):
    """Six CCDFs within 3 binomial SE of the conditioned oracle, everywhere."""
    cases = [
        ("strict edge", estimate_ccdf(ref_sims.strict, GRID, "edge"),
         _analytic(ccdf_ffr_edge, REF, STRICT, "edge")),
        ("strict interior", estimate_ccdf(ref_sims.strict, GRID, "interior"),
         _analytic(ccdf_ffr_interior, REF, STRICT, "interior")),
        ("sfr edge", estimate_ccdf(ref_sims.sfr4, GRID, "edge"),
         _analytic(ccdf_sfr_edge, REF_B4, SFR_B4, "edge")),
        ("sfr interior", estimate_ccdf(ref_sims.sfr4, GRID, "interior"),
         _analytic(ccdf_sfr_interior, REF_B4, SFR_B4, "interior")),
        ("no-reuse", estimate_ccdf(ref_sims.noreuse, GRID, "all"),
         [pc_general(t, REF, 1) for t in GRID]),
        ("reuse-3", estimate_ccdf(ref_sims.reuse3, GRID, "all"),
         [pc_general(t, REF, 3) for t in GRID]),
    ]
    worst_name, worst = "", 0.0
    for name, curve, analytic in cases:
        for an, mc, hw in zip(analytic, curve.value, curve.half_width):
            ratio = abs(an - mc) / hw
            if ratio > worst:
                worst_name, worst = name, ratio
    ok = worst <= 1.0 and ref_sims.elapsed < 300.0
    announce(1, ok, f"worst |analytic-mc|/3SE = {worst:.2f} ({worst_name}), "
                    f"sim time {ref_sims.elapsed:.0f}s (< 300s)")
    assert worst <= 1.0, f"worst deviation ratio {worst:.3f} on {worst_name}"
    assert ref_sims.elapsed < 300.0


def test_criterion_2_closed_form_equivalence():
    """Strict FFR closed forms within 1e-6 of quadrature on a 61-point grid
    (limit branch included); SFR deviation reported, quadrature authoritative."""
    grid_db = np.arange(-10.0, 20.25, 0.5)       # 61 points, hits 1.0 dB exactly
    assert len(grid_db) == 61 and 1.0 in grid_db

    dev_strict = 0.0
    for db in grid_db:
        q = CoverageQuery(10 ** (db / 10), REF, STRICT, "edge")
        dev_strict = max(dev_strict, abs(ccdf_closed_form(q) - ccdf_ffr_edge(q)))

    dev_sfr = 0.0
    for db in grid_db:
        q = CoverageQuery(10 ** (db / 10), REF_B4, SFR_B4, "edge")
        dev_sfr = max(dev_sfr, abs(ccdf_closed_form(q) - ccdf_sfr_edge(q)))
    errata = " (recorded as errata: exceeds 1e-3)" if dev_sfr > 1e-3 else ""

    ok = dev_strict <= 1e-6
    announce(2, ok, f"strict max|closed-quadrature| = {dev_strict:.2e} (<=1e-6); "
                    f"sfr max deviation = {dev_sfr:.2e}{errata}")
    assert dev_strict <= 1e-6


def test_criterion_3_sfr_bounds():
    """beta -> 1: matches a universal-reuse re-draw oracle within 3 SE.
    beta = 1e4: the exact-power simulation against the thinned baseline within
    0.01 absolute (the consolidated-eta analytic gap is reported alongside)."""
    # Lower bound: re-draw without thinning is the delta = 1 reassignment sim.
    p1 = NetworkParams(delta=1, t_ffr=T_FFR_1DB)
    redraw = simulate_strict_ffr(SimConfig(trials=100_000, seed=131), p1)
    curve = estimate_ccdf(redraw, GRID, "edge")
    sfr_b1 = SFR(3, 1.0, T_FFR_1DB)
    p_b1 = NetworkParams(beta=1.0, t_ffr=T_FFR_1DB)
    worst = 0.0
    for t, mc, hw in zip(curve.t, curve.value, curve.half_width):
        an = ccdf_sfr_edge(CoverageQuery(float(t), p_b1, sfr_b1, "edge"))
        worst = max(worst, abs(an - mc) / hw)
    low_ok = worst <= 1.0

    # Upper bound at beta = 1e4.
    p_big = NetworkParams(beta=1e4, t_ffr=T_FFR_1DB)
    big = simulate_sfr(SimConfig(trials=100_000, seed=32), p_big, "per_bs_exact")
    curve_big = estimate_ccdf(big, GRID, "edge")
    gap_mc = max(
        abs(mc - pc_general(float(t), REF, 3))
        for t, mc in zip(curve_big.t, curve_big.value)
    )
    sfr_big = SFR(3, 1e4, T_FFR_1DB)
    gap_analytic = max(
        abs(ccdf_sfr_edge(CoverageQuery(t, p_big, sfr_big, "edge")) - pc_general(t, REF, 3))
        for t in GRID
    )
    high_ok = gap_mc <= 0.01

    announce(3, low_ok and high_ok,
             f"beta=1 worst |dev|/3SE = {worst:.2f}; beta=1e4 exact-sim gap to "
             f"thinned baseline = {gap_mc:.4f} (<=0.01), eta-consolidated analytic "
             f"gap = {gap_analytic:.4f}")
    assert low_ok, f"beta=1 bound: worst ratio {worst:.3f}"
    assert high_ok, (
        f"beta=1e4 gap {gap_mc:.4f} > 0.01: at finite beta the classification "
        f"still skims off the best-geometry users (interior fraction "
        f"~ pc(beta*t_ffr, delta) = {pc_general(1e4 * T_FFR_1DB, REF, 3):.4f}), "
        f"which depresses the edge-conditioned tail by more than 0.01"
    )


def test_criterion_4_beta_crossover():
    """SFR overtakes Strict FFR at the median coverage point once beta = 20,
    and stays below it at beta = 4 (strict inequalities on analytic values)."""
    def strict_edge_db(db: float) -> float:
        return ccdf_ffr_edge(CoverageQuery(10 ** (db / 10), REF, STRICT, "edge"))

    lo, hi = -10.0, 20.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if strict_edge_db(mid) > 0.5:
            lo = mid
        else:
            hi = mid
    t_star = 10 ** (0.5 * (lo + hi) / 10)

    p20 = NetworkParams(beta=20.0, t_ffr=T_FFR_1DB)
    p4 = NetworkParams(beta=4.0, t_ffr=T_FFR_1DB)
    sfr20 = ccdf_sfr_edge(CoverageQuery(t_star, p20, SFR(3, 20.0, T_FFR_1DB), "edge"))
    sfr4 = ccdf_sfr_edge(CoverageQuery(t_star, p4, SFR(3, 4.0, T_FFR_1DB), "edge"))
    ok = sfr20 > 0.5 > sfr4
    announce(4, ok, f"median point T* = {10 * math.log10(t_star):.2f} dB; "
                    f"sfr(beta=20) = {sfr20:.4f} > 0.5 > sfr(beta=4) = {sfr4:.4f}")
    assert sfr20 > 0.5
    assert sfr4 < 0.5


def simpson_rate(ccdf, t_max: float = 20.0, n: int = 2000) -> float:
    h = t_max / n
    total = ccdf(1e-12) + ccdf(t_max)
    for i in range(1, n):
        total += (4 if i % 2 else 2) * ccdf(i * h)
    return total * h / 3.0


def test_criterion_5_rate_identity_and_ordering():
    """Rate integrals match an independent Simpson re-integration within 1e-4
    nats/Hz; Strict FFR dominates SFR(beta=4) and is nondecreasing in the
    classification threshold."""
    strict_rate = rate_ffr_edge(RateQuery(params=REF, scheme=STRICT))
    strict_simpson = simpson_rate(
        lambda t: ccdf_ffr_edge(CoverageQuery(math.expm1(t) or 1e-300, REF, STRICT, "edge"))
    )
    sfr_rate = rate_sfr_edge(RateQuery(params=REF_B4, scheme=SFR_B4))
    sfr_simpson = simpson_rate(
        lambda t: ccdf_sfr_edge(CoverageQuery(math.expm1(t) or 1e-300, REF_B4, SFR_B4, "edge"))
    )
    dev = max(abs(strict_rate - strict_simpson), abs(sfr_rate - sfr_simpson))

    strict_curve, sfr_curve = [], []
    for db in (-10.0, -5.0, 0.0, 5.0, 10.0):
        tr = 10 ** (db / 10)
        strict_curve.append(
            rate_ffr_edge(RateQuery(params=NetworkParams(t_ffr=tr), scheme=StrictFFR(3, tr)))
        )
        sfr_curve.append(
            rate_sfr_edge(
                RateQuery(params=NetworkParams(beta=4.0, t_ffr=tr), scheme=SFR(3, 4.0, tr))
            )
        )
    ordered = all(s > f for s, f in zip(strict_curve, sfr_curve))
    nondecreasing = all(b >= a for a, b in zip(strict_curve, strict_curve[1:]))

    ok = dev <= 1e-4 and ordered and nondecreasing
    announce(5, ok, f"max |rate - simpson| = {dev:.2e} (<=1e-4); "
                    f"strict>sfr at 5 thresholds: {ordered}; nondecreasing: {nondecreasing}")
    assert dev <= 1e-4
    assert ordered
    assert nondecreasing


def test_criterion_6_sum_rate_trends():
    """Edge-band sweep at t_ffr = 3 dB: Strict FFR strictly decreasing; the
    SFR(beta=2) sweep within 5%; Strict FFR at the full edge allocation below
    the classical-reuse sum rate."""
    tr3 = 10 ** 0.3
    p3 = NetworkParams(t_ffr=tr3)
    p3b2 = NetworkParams(beta=2.0, t_ffr=tr3)
    config = SimConfig(trials=100_000, seed=61)
    strict_out = simulate_strict_ffr(config, p3)
    sfr_out = simulate_sfr(config, p3b2, "effective_eta")
    reuse3_out = simulate_baseline(config, p3, ReuseDelta(3))

    sweep = (2, 4, 8, 12, 16)
    strict_sums = [
        sum_rate_experiment(config, p3, StrictFFR(3, tr3), 48, n, outcomes=strict_out).sum_rate
        for n in sweep
    ]
    sfr_sums = [
        sum_rate_experiment(config, p3b2, SFR(3, 2.0, tr3), 48, n, outcomes=sfr_out).sum_rate
        for n in sweep
    ]
    reuse3_sum = sum_rate_experiment(config, p3, ReuseDelta(3), 48, 0, outcomes=reuse3_out).sum_rate

    decreasing = all(b < a for a, b in zip(strict_sums, strict_sums[1:]))
    variation = (max(sfr_sums) - min(sfr_sums)) / max(sfr_sums)
    below_reuse3 = strict_sums[-1] < reuse3_sum

    ok = decreasing and variation < 0.05 and below_reuse3
    announce(6, ok,
             f"strict decreasing: {decreasing} ({strict_sums[0]:.1f} -> {strict_sums[-1]:.1f}); "
             f"sfr variation = {variation:.3f} (<0.05); "
             f"strict@16 = {strict_sums[-1]:.1f} < reuse-3 = {reuse3_sum:.1f}: {below_reuse3}")
    assert decreasing
    assert below_reuse3
    assert variation < 0.05, (
        f"SFR sum rate varies by {variation:.1%} over the sweep: with class-"
        f"conditioned per-band rates the interior mean ({sfr_sums[0]:.1f} at "
        f"n_edge=2) necessarily exceeds the boosted edge mean, so trading 14 "
        f"interior bands for edge bands moves the sum by far more than 5%"
    )


def test_criterion_7_proportional_crossover():
    """Threshold sweep with proportional sizing: both FFR schemes above the
    better baseline everywhere, SFR ahead at the low end, Strict FFR ahead at
    the high end, with exactly one sign change."""
    config = SimConfig(trials=30_000, seed=71)
    sweep_db = np.arange(-5.0, 10.1, 2.5)
    strict_sums, sfr_sums = [], []
    for db in sweep_db:
        tr = 10 ** (db / 10)
        ps = NetworkParams(t_ffr=tr)
        pf = NetworkParams(beta=2.0, t_ffr=tr)
        plan_s = sinr_proportional(ps, StrictFFR(3, tr), 48)
        plan_f = sinr_proportional(pf, SFR(3, 2.0, tr), 48)
        out_s = simulate_strict_ffr(config, ps)
        out_f = simulate_sfr(config, pf, "effective_eta")
        strict_sums.append(
            sum_rate_experiment(config, ps, StrictFFR(3, tr), 48, plan_s.n_edge,
                                outcomes=out_s).sum_rate
        )
        sfr_sums.append(
            sum_rate_experiment(config, pf, SFR(3, 2.0, tr), 48, plan_f.n_edge,
                                outcomes=out_f).sum_rate
        )

    p_any = NetworkParams(t_ffr=T_FFR_1DB)
    nr_out = simulate_baseline(config, p_any, NoReuse())
    r3_out = simulate_baseline(config, p_any, ReuseDelta(3))
    baseline = max(
        sum_rate_experiment(config, p_any, NoReuse(), 48, 0, outcomes=nr_out).sum_rate,
        sum_rate_experiment(config, p_any, ReuseDelta(3), 48, 0, outcomes=r3_out).sum_rate,
    )

    above = all(v >= baseline for v in strict_sums) and all(v >= baseline for v in sfr_sums)
    diff = np.array(sfr_sums) - np.array(strict_sums)
    sfr_low = diff[0] > 0
    strict_high = diff[-1] < 0
    nonzero = diff[np.nonzero(diff)]
    changes = int(np.count_nonzero(np.diff(np.sign(nonzero))))

    ok = above and sfr_low and strict_high and changes == 1
    announce(7, ok,
             f"baseline={baseline:.1f}; strict={[f'{v:.0f}' for v in strict_sums]}; "
             f"sfr={[f'{v:.0f}' for v in sfr_sums]}; above-baseline: {above}; "
             f"sfr ahead low: {sfr_low}; strict ahead high: {strict_high}; "
             f"sign changes: {changes}")
    assert above, (
        f"strict sums {[f'{v:.0f}' for v in strict_sums]} fall below the "
        f"baseline {baseline:.1f}: reserving delta*n_edge sub-bands idles "
        f"spectrum faster than the edge-band rates recover"
    )
    assert sfr_low
    assert strict_high, (
        "the class-conditioned sum keeps SFR ahead at every threshold: its "
        "interior bands never idle, while Strict FFR's interior block shrinks "
        "to zero once the proportional rule saturates n_edge"
    )
    assert changes == 1


def test_criterion_8_structural_identities(ref_sims, tmp_path):
    """Interior CCDFs exactly 1 below the threshold; density invariance at
    zero noise; monotone emitted curves; byte-identical CSV reproduction."""
    # Interior identity at machine precision.
    interior_one = all(
        ccdf_ffr_interior(CoverageQuery(t, REF, STRICT, "interior")) == 1.0
        and ccdf_sfr_interior(CoverageQuery(t, REF_B4, SFR_B4, "interior")) == 1.0
        for t in (1e-6, 0.3, T_FFR_1DB)
    )

    # Density invariance under no noise.
    dense = NetworkParams(lam=2.5e-4, t_ffr=T_FFR_1DB)
    dense4 = NetworkParams(lam=2.5e-4, beta=4.0, t_ffr=T_FFR_1DB)
    lam_dev = 0.0
    for t in (0.5, 2.0, 20.0):
        pairs = [
            (ccdf_ffr_edge(CoverageQuery(t, REF, STRICT, "edge")),
             ccdf_ffr_edge(CoverageQuery(t, dense, STRICT, "edge"))),
            (ccdf_sfr_edge(CoverageQuery(t, REF_B4, SFR_B4, "edge")),
             ccdf_sfr_edge(CoverageQuery(t, dense4, SFR_B4, "edge"))),
            (pc_general(t, REF, 3), pc_general(t, dense, 3)),
        ]
        lam_dev = max(lam_dev, max(abs(a - b) for a, b in pairs))

    # Monotonicity of every curve this suite emits.
    curves = [
        estimate_ccdf(ref_sims.strict, GRID, "edge"),
        estimate_ccdf(ref_sims.strict, GRID, "interior"),
        estimate_ccdf(ref_sims.sfr4, GRID, "edge"),
        estimate_ccdf(ref_sims.sfr4, GRID, "interior"),
        estimate_ccdf(ref_sims.noreuse, GRID, "all"),
        estimate_ccdf(ref_sims.reuse3, GRID, "all"),
        coverage_curve(GRID, REF, STRICT, "edge"),
        coverage_curve(GRID, REF_B4, SFR_B4, "edge"),
        coverage_curve(GRID, REF, NoReuse(), "interior"),
    ]
    for curve in curves:
        curve.check()

    # Deterministic byte-for-byte CLI reproduction.
    out = tmp_path / "repro.csv"
    args = ["coverage", "--scheme", "strict-ffr", "--class", "edge",
            "--tffr-db", "1", "--trials", "2000", "--seed", "42",
            "--t-grid-db", "-6:18:6", "--out", str(out)]
    assert cli_main(args) == 0
    first = out.read_bytes()
    assert cli_main(args) == 0
    reproduced = out.read_bytes() == first

    ok = interior_one and lam_dev <= 1e-9 and reproduced
    announce(8, ok, f"interior==1: {interior_one}; max density dev = {lam_dev:.1e} "
                    f"(<=1e-9); curves monotone: True; CSV byte-identical: {reproduced}")
    assert interior_one
    assert lam_dev <= 1e-9
    assert reproduced


def test_criterion_9_grid_optimism():
    """The 5x5 lattice deployment dominates the random-deployment analysis
    pointwise for both schemes' edge users."""
    config = SimConfig(trials=100_000, seed=91, deployment_source="grid")
    strict_out = simulate_strict_ffr(config, REF)
    sfr_out = simulate_sfr(config, REF_B4, "effective_eta")

    strict_curve = estimate_ccdf(strict_out, GRID, "edge")
    sfr_curve = estimate_ccdf(sfr_out, GRID, "edge")
    margin_s = min(
        mc - ccdf_ffr_edge(CoverageQuery(float(t), REF, STRICT, "edge"))
        for t, mc in zip(strict_curve.t, strict_curve.value)
    )
    margin_f = min(
        mc - ccdf_sfr_edge(CoverageQuery(float(t), REF_B4, SFR_B4, "edge"))
        for t, mc in zip(sfr_curve.t, sfr_curve.value)
    )
    ok = margin_s >= 0.0 and margin_f >= 0.0
    announce(9, ok, f"min grid-minus-analytic margin: strict = {margin_s:+.4f}, "
                    f"sfr = {margin_f:+.4f} (>= 0)")
    assert margin_s >= 0.0
    assert margin_f >= 0.0
