"""Command-line front end.

Subcommands:
  coverage  -- analytic CCDF vs Monte-Carlo over a threshold grid
  rate      -- analytic edge rate vs Monte-Carlo over a classification sweep
  sumrate   -- per-cell sum rate over an edge-band or threshold sweep
  allocate  -- SINR-proportional sub-band plan

Every output file starts with '#'-prefixed header lines echoing the fully
resolved parameters and seed, so re-running the same command reproduces the
file byte for byte.  dB values are accepted only on flags suffixed -db; CSV
columns are linear unless suffixed _db.  Figures (--plot) are rendered next
to the CSV.  The FFREVAL_THREADS environment variable caps Monte-Carlo
workers.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .allocation import sinr_proportional
from .coverage import (
    CoverageQuery,
    ccdf_ffr_edge,
    ccdf_ffr_interior,
    ccdf_sfr_edge,
    ccdf_sfr_interior,
    pc_general,
)
from .model import (
    SFR,
    DegenerateRegimeError,
    NetworkParams,
    NoReuse,
    ReuseDelta,
    StrictFFR,
    db_to_linear,
)
from .montecarlo import (
    DeploymentError,
    SimConfig,
    estimate_ccdf,
    mean_rate,
    simulate,
    sum_rate_experiment,
)
from .quadrature import QuadratureError
from .rate import RateQuery, rate_edge

_EXIT_ROWS_FAILED = 1
_EXIT_CONFIG = 2
_EXIT_ORACLE = 3


class ConfigError(ValueError):
    pass


def _parse_grid_db(text: str) -> list[float]:
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {text!r}, expected lo:hi:step") from exc
    if step <= 0 or hi < lo:
        raise ConfigError(f"bad grid spec {text!r}: need step > 0 and hi >= lo")
    n = int(round((hi - lo) / step)) + 1
    return [lo + i * step for i in range(n)]


def _parse_grid_deployment(text: str) -> tuple[int, float]:
    try:
        count, area_km2 = text.split(":")
        return int(count), float(area_km2) * 1e6
    except ValueError as exc:
        raise ConfigError(f"bad --grid spec {text!r}, expected count:area_km2") from exc


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=4.0, help="path-loss exponent")
    parser.add_argument("--lambda", dest="lam", type=float, default=2.5e-6,
                        help="base-station density per m^2")
    noise = parser.add_mutually_exclusive_group()
    noise.add_argument("--no-noise", action="store_true", default=True,
                       help="interference-limited (sigma2 = 0, default)")
    noise.add_argument("--sigma2", type=float, default=None, help="noise power, linear")
    parser.add_argument("--power", type=float, default=1.0, help="BS transmit power, linear")
    parser.add_argument("--mu", type=float, default=1.0, help="exponential fading rate")
    parser.add_argument("--delta", type=int, default=3, help="cell-edge reuse factor")
    parser.add_argument("--beta", type=float, default=1.0, help="SFR edge power factor")
    parser.add_argument("--tffr-db", type=float, default=None,
                        help="interior/edge classification threshold, dB")
    parser.add_argument("--t-grid-db", type=str, default=None,
                        help="threshold sweep as lo:hi:step in dB")
    parser.add_argument("--trials", type=int, default=20000,
                        help="Monte-Carlo trials (0 = analytic only)")
    parser.add_argument("--seed", type=int, default=0, help="master RNG seed")
    parser.add_argument("--deployment", type=str, default=None,
                        help="deployment CSV (header id,x_m,y_m)")
    parser.add_argument("--grid", type=str, default=None,
                        help="grid deployment as count:area_km2 (e.g. 25:10)")
    parser.add_argument("--window-factor", type=float, default=20.0,
                        help="PPP window radius in mean nearest-neighbor distances")
    parser.add_argument("--denominator", choices=("appendix", "theorem"), default="appendix",
                        help="SFR edge conditioning variant")
    parser.add_argument("--interference-mode", choices=("effective-eta", "per-bs-exact"),
                        default="effective-eta", help="SFR interference model for Monte-Carlo")
    parser.add_argument("--out", type=str, default=None, help="output CSV path")
    parser.add_argument("--plot", action="store_true",
                        help="render a figure next to the CSV output")


def _build_params(args: argparse.Namespace, need_tffr: bool) -> NetworkParams:
    sigma2 = 0.0 if args.sigma2 is None else args.sigma2
    if need_tffr and args.tffr_db is None:
        raise ConfigError(f"--tffr-db is required for scheme {args.scheme!r}")
    t_ffr = db_to_linear(args.tffr_db) if args.tffr_db is not None else 1.0
    try:
        return NetworkParams(
            lam=args.lam, alpha=args.alpha, sigma2=sigma2, power=args.power,
            mu=args.mu, delta=args.delta, beta=args.beta, t_ffr=t_ffr,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _build_scheme(name: str, params: NetworkParams):
    if name == "no-reuse":
        return NoReuse()
    if name == "reuse-delta":
        return ReuseDelta(params.delta)
    if name == "strict-ffr":
        return StrictFFR.from_params(params)
    if name == "sfr":
        return SFR.from_params(params)
    raise ConfigError(f"unknown scheme {name!r}")


def _build_simconfig(args: argparse.Namespace, trials: Optional[int] = None) -> SimConfig:
    source, path, grid_count, area = "ppp", None, 25, 10.0e6
    if args.deployment and args.grid:
        raise ConfigError("--deployment and --grid are mutually exclusive")
    if args.deployment:
        source, path = "file", args.deployment
    elif args.grid:
        source = "grid"
        grid_count, area = _parse_grid_deployment(args.grid)
    try:
        return SimConfig(
            trials=trials if trials is not None else max(args.trials, 1),
            seed=args.seed,
            window_radius_factor=args.window_factor,
            deployment_source=source,
            deployment_path=path,
            grid_count=grid_count,
            area=area,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _header_lines(command: str, args: argparse.Namespace, params: NetworkParams) -> list[str]:
    resolved = {
        "command": command,
        "version": __version__,
        "scheme": getattr(args, "scheme", None),
        "class": getattr(args, "user_class", None),
        "denominator": args.denominator,
        "interference_mode": args.interference_mode,
        "trials": args.trials,
        "seed": args.seed,
        "deployment": args.deployment or (f"grid:{args.grid}" if args.grid else "ppp"),
        "window_factor": args.window_factor,
    }
    resolved.update({f"param_{k}": v for k, v in asdict(params).items()})
    lines = [f"# ffreval {command}"]
    lines += [f"# {k}={resolved[k]}" for k in sorted(resolved) if resolved[k] is not None]
    return lines


def _fmt(x: float) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return "nan"
    return f"{x:.10g}"


def _write_output(path: Optional[str], lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _analytic_ccdf(t: float, params: NetworkParams, scheme, user_class: str,
                   denominator: str) -> float:
    if isinstance(scheme, NoReuse):
        return pc_general(t, params, 1)
    if isinstance(scheme, ReuseDelta):
        return pc_general(t, params, scheme.delta)
    if user_class == "all":
        # Mixture over the classification split.
        if isinstance(scheme, StrictFFR):
            w_edge = 1.0 - pc_general(scheme.t_ffr, params, 1)
        else:
            eta = (scheme.delta - 1 + scheme.beta) / scheme.delta
            w_edge = 1.0 - pc_general(eta * scheme.t_ffr, params, 1)
        edge = _analytic_ccdf(t, params, scheme, "edge", denominator)
        interior = _analytic_ccdf(t, params, scheme, "interior", denominator)
        return w_edge * edge + (1.0 - w_edge) * interior
    query = CoverageQuery(t, params, scheme, user_class)
    if isinstance(scheme, StrictFFR):
        return ccdf_ffr_edge(query) if user_class == "edge" else ccdf_ffr_interior(query)
    if user_class == "edge":
        return ccdf_sfr_edge(query, denominator=denominator)
    return ccdf_sfr_interior(query)


# --- subcommands --------------------------------------------------------------


def cmd_coverage(args: argparse.Namespace) -> int:
    needs_tffr = args.scheme in ("strict-ffr", "sfr")
    params = _build_params(args, needs_tffr)
    scheme = _build_scheme(args.scheme, params)
    if args.user_class in ("edge", "interior") and args.scheme in ("no-reuse", "reuse-delta"):
        raise ConfigError("baseline schemes take --class all")
    grid_db = _parse_grid_db(args.t_grid_db or "-10:20:1")
    t_lin = [db_to_linear(t) for t in grid_db]

    analytic = [
        _analytic_ccdf(t, params, scheme, args.user_class, args.denominator) for t in t_lin
    ]

    mc_curve = None
    if args.trials > 0:
        config = _build_simconfig(args)
        mode = args.interference_mode.replace("-", "_")
        outcomes = simulate(config, params, scheme, interference_mode=mode)
        conditioning = args.user_class if args.user_class != "all" else "all"
        mc_curve = estimate_ccdf(outcomes, t_lin, conditioning)

    lines = _header_lines("coverage", args, params)
    all_pass = True
    if mc_curve is None:
        lines.append("t_db,analytic")
        lines += [f"{_fmt(db)},{_fmt(a)}" for db, a in zip(grid_db, analytic)]
    else:
        lines.append("t_db,analytic,mc,mc_halfwidth,pass3sigma")
        for db, a, m, h in zip(grid_db, analytic, mc_curve.value, mc_curve.half_width):
            ok = abs(a - m) <= h
            all_pass &= ok
            lines.append(f"{_fmt(db)},{_fmt(a)},{_fmt(m)},{_fmt(h)},{int(ok)}")
    _write_output(args.out, lines)

    if args.plot and args.out:
        from . import plotting
        plotting.render_coverage(
            _plot_path(args.out), grid_db, analytic,
            None if mc_curve is None else mc_curve.value,
            None if mc_curve is None else mc_curve.half_width,
            f"{args.scheme} / {args.user_class}",
        )
    if mc_curve is not None:
        print(f"coverage: {'all rows pass' if all_pass else 'SOME ROWS FAIL'} "
              f"({len(grid_db)} thresholds)", file=sys.stderr)
    return 0 if all_pass else _EXIT_ROWS_FAILED


def cmd_rate(args: argparse.Namespace) -> int:
    if args.scheme not in ("strict-ffr", "sfr"):
        raise ConfigError("rate supports --scheme strict-ffr or sfr")
    grid_db = _parse_grid_db(args.t_grid_db or "-10:10:5")

    rows = []
    for tffr_db in grid_db:
        args.tffr_db = tffr_db
        params = _build_params(args, True)
        scheme = _build_scheme(args.scheme, params)
        query = RateQuery(params=params, scheme=scheme, user_class="edge")
        analytic = rate_edge(query, args.denominator)
        mc_val, mc_half = float("nan"), float("nan")
        if args.trials > 0:
            config = _build_simconfig(args)
            mode = args.interference_mode.replace("-", "_")
            outcomes = simulate(config, params, scheme, interference_mode=mode)
            mc_val, mc_half = mean_rate(outcomes, "edge")
        rows.append((tffr_db, analytic, mc_val, mc_half))

    params_echo = _build_params(args, True)
    lines = _header_lines("rate", args, params_echo)
    lines.append("tffr_db,rate_analytic_nats,rate_mc_nats,halfwidth")
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _write_output(args.out, lines)

    if args.plot and args.out:
        from . import plotting
        has_mc = args.trials > 0
        plotting.render_rate(
            _plot_path(args.out), [r[0] for r in rows], [r[1] for r in rows],
            [r[2] for r in rows] if has_mc else None,
            [r[3] for r in rows] if has_mc else None,
            f"{args.scheme} edge rate",
        )
    return 0


def cmd_sumrate(args: argparse.Namespace) -> int:
    params = _build_params(args, True)
    schemes = {
        "strict-ffr": StrictFFR.from_params(params),
        "sfr": SFR.from_params(params),
        "no-reuse": NoReuse(),
        "reuse-delta": ReuseDelta(params.delta),
    }
    config = _build_simconfig(args)
    mode = args.interference_mode.replace("-", "_")
    outcomes = {
        name: simulate(config, params, scheme, interference_mode=mode)
        for name, scheme in schemes.items()
    }

    lines = _header_lines("sumrate", args, params)
    trailer: list[str] = []
    series: dict[str, list[float]] = {name: [] for name in schemes}

    if args.sweep == "edge-bands":
        n_edges = [int(v) for v in args.n_edge_list.split(",")]
        x_values: list[float] = []
        lines.append("n_edge,scheme,sum_rate,edge_rate,interior_rate,feasible")
        for n_edge in n_edges:
            x_values.append(n_edge)
            for name, scheme in schemes.items():
                try:
                    res = sum_rate_experiment(
                        config, params, scheme, args.n_band, n_edge, outcomes=outcomes[name]
                    )
                    lines.append(
                        f"{n_edge},{name},{_fmt(res.sum_rate)},{_fmt(res.edge_rate)},"
                        f"{_fmt(res.interior_rate)},1"
                    )
                    series[name].append(res.sum_rate)
                except ValueError:
                    lines.append(f"{n_edge},{name},nan,nan,nan,0")
                    series[name].append(float("nan"))
        strict_vals = series["strict-ffr"]
        decreasing = all(b < a for a, b in zip(strict_vals, strict_vals[1:]))
        trailer.append(f"# trend_strict_decreasing={str(decreasing).lower()}")
        xlabel = "edge sub-bands per cell"
    else:  # tffr sweep with SINR-proportional sizing
        grid_db = _parse_grid_db(args.t_grid_db or "-5:10:2.5")
        x_values = list(grid_db)
        lines.append("tffr_db,scheme,n_edge,sum_rate,edge_rate,interior_rate")
        for tffr_db in grid_db:
            args.tffr_db = tffr_db
            p_t = _build_params(args, True)
            schemes_t = {
                "strict-ffr": StrictFFR.from_params(p_t),
                "sfr": SFR.from_params(p_t),
                "no-reuse": NoReuse(),
                "reuse-delta": ReuseDelta(p_t.delta),
            }
            for name, scheme in schemes_t.items():
                out_t = simulate(config, p_t, scheme, interference_mode=mode)
                if name in ("strict-ffr", "sfr"):
                    plan = sinr_proportional(p_t, scheme, args.n_band, args.denominator)
                    n_edge = plan.n_edge
                else:
                    n_edge = 0
                res = sum_rate_experiment(
                    config, p_t, scheme, args.n_band, n_edge, outcomes=out_t
                )
                lines.append(
                    f"{_fmt(tffr_db)},{name},{n_edge},{_fmt(res.sum_rate)},"
                    f"{_fmt(res.edge_rate)},{_fmt(res.interior_rate)}"
                )
                series[name].append(res.sum_rate)
        diff = np.array(series["sfr"]) - np.array(series["strict-ffr"])
        signs = np.sign(diff[np.nonzero(diff)])
        changes = int(np.count_nonzero(np.diff(signs)))
        trailer.append(f"# sign_changes_sfr_minus_strict={changes}")
        cross = next(
            (x for x, a, b in zip(x_values, diff[:-1], diff[1:]) if np.sign(a) != np.sign(b)),
            None,
        )
        trailer.append(f"# crossover_tffr_db={_fmt(cross) if cross is not None else 'none'}")
        xlabel = "classification threshold (dB)"

    lines += trailer
    _write_output(args.out, lines)
    if args.plot and args.out:
        from . import plotting
        plotting.render_sumrate(_plot_path(args.out), x_values, series, xlabel, "per-cell sum rate")
    return 0


def cmd_allocate(args: argparse.Namespace) -> int:
    if args.scheme not in ("strict-ffr", "sfr"):
        raise ConfigError("allocate supports --scheme strict-ffr or sfr")
    params = _build_params(args, True)
    scheme = _build_scheme(args.scheme, params)
    plan = sinr_proportional(params, scheme, args.n_band, args.denominator)
    lines = _header_lines("allocate", args, params)
    for key in ("scheme", "n_band", "n_int", "n_edge", "delta", "utilized", "idle", "clamped"):
        lines.append(f"{key}={getattr(plan, key)}")
    _write_output(args.out, lines)
    return 0


def _plot_path(out: str) -> str:
    stem = out[:-4] if out.endswith(".csv") else out
    return stem + ".png"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ffreval",
        description="Coverage, rate, and sub-band planning for FFR cellular downlinks",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_cov = sub.add_parser("coverage", help="CCDF curve with Monte-Carlo comparison")
    p_cov.add_argument("--scheme", required=True,
                       choices=("no-reuse", "reuse-delta", "strict-ffr", "sfr"))
    p_cov.add_argument("--class", dest="user_class", default="all",
                       choices=("edge", "interior", "all"))
    _add_common(p_cov)
    p_cov.set_defaults(func=cmd_coverage)

    p_rate = sub.add_parser("rate", help="edge-user rate over a threshold sweep")
    p_rate.add_argument("--scheme", required=True, choices=("strict-ffr", "sfr"))
    _add_common(p_rate)
    p_rate.set_defaults(func=cmd_rate)

    p_sum = sub.add_parser("sumrate", help="per-cell sum rate sweeps")
    p_sum.add_argument("--sweep", choices=("edge-bands", "tffr"), default="edge-bands")
    p_sum.add_argument("--n-band", type=int, default=48)
    p_sum.add_argument("--n-edge-list", type=str, default="2,4,8,12,16")
    _add_common(p_sum)
    p_sum.set_defaults(func=cmd_sumrate)

    p_alloc = sub.add_parser("allocate", help="SINR-proportional sub-band plan")
    p_alloc.add_argument("--scheme", required=True, choices=("strict-ffr", "sfr"))
    p_alloc.add_argument("--n-band", type=int, default=48)
    _add_common(p_alloc)
    p_alloc.set_defaults(func=cmd_allocate)
    return parser


def _merge_grid_values(argv: list[str]) -> list[str]:
    """Join '--t-grid-db -10:20:1' into one token so argparse does not read
    the leading minus of the grid spec as an option."""
    merged: list[str] = []
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--t-grid-db" and i + 1 < len(argv):
            merged.append(f"{tok}={argv[i + 1]}")
            skip = True
        else:
            merged.append(tok)
    return merged


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parser.parse_args(_merge_grid_values(argv))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"ffreval: config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (DegenerateRegimeError, DeploymentError, QuadratureError) as exc:
        print(f"ffreval: oracle failure: {exc}", file=sys.stderr)
        return _EXIT_ORACLE


if __name__ == "__main__":
    sys.exit(main())
