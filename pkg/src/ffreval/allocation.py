"""Sub-band partitioning for Strict FFR and SFR, and SINR-proportional sizing.

Strict FFR splits ``n_band`` into a common interior block and ``delta``
disjoint edge blocks, so each cell transmits ``n_int + n_edge`` sub-bands and
leaves the other cells' edge blocks idle.  SFR re-labels ``n_edge`` of the
cell's own sub-bands as boosted, transmitting all of them.  The proportional
rule sizes ``n_edge`` from the analytic edge CCDF evaluated at the
classification threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

from .coverage import CoverageQuery, Denominator, ccdf_ffr_edge, ccdf_sfr_edge
from .model import SFR, NetworkParams, StrictFFR


@dataclass(frozen=True)
class AllocationPlan:
    """A feasible sub-band split for one cell."""

    n_band: int
    n_int: int
    n_edge: int
    delta: int
    scheme: Literal["strict-ffr", "sfr"]
    utilized: int
    clamped: bool = False

    def __post_init__(self) -> None:
        if self.n_band <= 0:
            raise ValueError("n_band must be > 0")
        if self.n_int < 0 or self.n_edge < 0:
            raise ValueError("band counts must be >= 0")
        if self.scheme == "strict-ffr":
            if self.n_edge != (self.n_band - self.n_int) // self.delta:
                raise ValueError("strict FFR requires n_edge = (n_band - n_int) // delta")
            if self.utilized != self.n_int + self.n_edge or self.utilized > self.n_band:
                raise ValueError("strict FFR transmits n_int + n_edge <= n_band sub-bands")
        elif self.scheme == "sfr":
            if self.n_int != self.n_band - self.n_edge:
                raise ValueError("SFR requires n_int = n_band - n_edge")
            if self.n_edge > self.n_band // self.delta:
                raise ValueError("SFR requires n_edge <= n_band // delta")
            if self.utilized != self.n_band:
                raise ValueError("SFR transmits every sub-band")
        else:
            raise ValueError("scheme must be 'strict-ffr' or 'sfr'")

    @property
    def idle(self) -> int:
        """Sub-bands this cell leaves untransmitted."""
        return self.n_band - self.utilized


def strict_allocation(n_band: int, n_int: int, delta: int) -> AllocationPlan:
    """Strict FFR split: the non-interior spectrum is shared across delta
    disjoint edge blocks, one per reuse group."""
    if not 0 <= n_int <= n_band:
        raise ValueError("need 0 <= n_int <= n_band")
    n_edge = (n_band - n_int) // delta
    return AllocationPlan(
        n_band=n_band,
        n_int=n_int,
        n_edge=n_edge,
        delta=delta,
        scheme="strict-ffr",
        utilized=n_int + n_edge,
    )


def sfr_allocation(n_band: int, n_edge: int, delta: int) -> AllocationPlan:
    """SFR split: every sub-band is transmitted, n_edge of them boosted."""
    if n_edge < 0:
        raise ValueError("n_edge must be >= 0")
    if n_edge > n_band // delta:
        raise ValueError(
            f"n_edge={n_edge} violates the SFR constraint n_edge <= n_band // delta "
            f"= {n_band // delta}"
        )
    return AllocationPlan(
        n_band=n_band,
        n_int=n_band - n_edge,
        n_edge=n_edge,
        delta=delta,
        scheme="sfr",
        utilized=n_band,
    )


def sinr_proportional(
    params: NetworkParams,
    scheme: Union[StrictFFR, SFR],
    n_band: int,
    denominator: Denominator = "appendix",
) -> AllocationPlan:
    """Size the edge block from the scheme's analytic edge CCDF at the
    classification threshold: n_edge = floor((1 - ccdf) * n_band), clamped to
    the scheme's feasibility limit with the clamp flagged."""
    query = CoverageQuery(scheme.t_ffr, params, scheme, "edge")
    if isinstance(scheme, StrictFFR):
        covered = ccdf_ffr_edge(query)
    else:
        covered = ccdf_sfr_edge(query, denominator=denominator)

    n_edge = math.floor((1.0 - covered) * n_band)
    limit = n_band // scheme.delta
    clamped = False
    if n_edge > limit:
        n_edge = limit
        clamped = True
    if n_edge < 0:
        n_edge = 0
        clamped = True

    if isinstance(scheme, StrictFFR):
        plan = strict_allocation(n_band, n_band - scheme.delta * n_edge, scheme.delta)
    else:
        plan = sfr_allocation(n_band, n_edge, scheme.delta)
    if clamped:
        plan = AllocationPlan(
            n_band=plan.n_band,
            n_int=plan.n_int,
            n_edge=plan.n_edge,
            delta=plan.delta,
            scheme=plan.scheme,
            utilized=plan.utilized,
            clamped=True,
        )
    return plan
