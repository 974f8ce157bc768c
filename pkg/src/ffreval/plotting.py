"""Matplotlib rendering for the CLI report paths.

Figures are written next to the delimited output, never shown interactively;
the Agg backend is forced so headless runs work.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_STYLE = {
    "figure.figsize": (6.4, 4.4),
    "figure.dpi": 110,
    "savefig.dpi": 200,
    "savefig.bbox": "tight",
    "axes.grid": True,
    "grid.alpha": 0.35,
    "grid.linestyle": ":",
    "axes.linewidth": 0.8,
    "font.size": 10,
    "legend.fontsize": 9,
    "lines.linewidth": 1.6,
}


def apply_style() -> None:
    plt.rcParams.update(_STYLE)


def render_coverage(
    path: str,
    t_db: Sequence[float],
    analytic: Sequence[float],
    mc: Sequence[float] | None,
    mc_halfwidth: Sequence[float] | None,
    title: str,
) -> None:
    apply_style()
    fig, ax = plt.subplots()
    ax.plot(t_db, analytic, label="analytic", color="tab:blue")
    if mc is not None:
        ax.errorbar(
            t_db, mc, yerr=mc_halfwidth, fmt="o", ms=3.5, lw=0.9, capsize=2,
            label="Monte-Carlo (3$\\sigma$)", color="tab:red",
        )
    ax.set_xlabel("SINR threshold (dB)")
    ax.set_ylabel("coverage probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


def render_rate(
    path: str,
    tffr_db: Sequence[float],
    analytic: Sequence[float],
    mc: Sequence[float] | None,
    mc_halfwidth: Sequence[float] | None,
    title: str,
) -> None:
    apply_style()
    fig, ax = plt.subplots()
    ax.plot(tffr_db, analytic, marker="s", ms=3.5, label="analytic", color="tab:blue")
    if mc is not None:
        ax.errorbar(
            tffr_db, mc, yerr=mc_halfwidth, fmt="o", ms=3.5, lw=0.9, capsize=2,
            label="Monte-Carlo (3$\\sigma$)", color="tab:red",
        )
    ax.set_xlabel("classification threshold (dB)")
    ax.set_ylabel("edge-user rate (nats/Hz)")
    ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)


def render_sumrate(
    path: str,
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    xlabel: str,
    title: str,
) -> None:
    apply_style()
    fig, ax = plt.subplots()
    markers = {"strict-ffr": "s", "sfr": "o", "no-reuse": "^", "reuse-delta": "v"}
    for name, values in series.items():
        ax.plot(x, values, marker=markers.get(name, "."), ms=4, label=name)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("per-cell sum rate (nats/Hz)")
    ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)
