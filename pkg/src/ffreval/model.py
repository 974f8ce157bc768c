"""Domain types and the SINR kernel shared by the analytic and Monte-Carlo paths.

All quantities are linear (never dB) and all distances are in meters; dB
conversion happens only at the CLI boundary.  The small-scale fading
parameter ``mu`` is the *rate* of the exponential fade distribution, so the
default mu=1 gives unit-mean fades.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

UserClass = Literal["interior", "edge"]


class DegenerateRegimeError(ValueError):
    """A query fell into a regime with no well-defined answer.

    Examples: an SINR with no interferers and zero noise, or an edge-user
    statistic when the classification threshold leaves no edge users.
    """


@dataclass(frozen=True)
class NetworkParams:
    """Physical model parameters for the downlink under study."""

    lam: float = 2.5e-6          # base stations per m^2
    alpha: float = 4.0           # path-loss exponent, > 2
    sigma2: float = 0.0          # noise power (linear); 0 = interference-limited
    power: float = 1.0           # per-BS transmit power (linear)
    mu: float = 1.0              # exponential fading rate
    delta: int = 3               # cell-edge reuse factor
    beta: float = 1.0            # SFR edge power factor, >= 1
    t_ffr: float = 1.0           # interior/edge classification threshold (linear SINR)

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError("lam must be > 0")
        if not self.alpha > 2:
            raise ValueError("alpha must be > 2 for interference integrals to converge")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be >= 0")
        if not self.power > 0:
            raise ValueError("power must be > 0")
        if not self.mu > 0:
            raise ValueError("mu must be > 0")
        if int(self.delta) != self.delta or self.delta < 1:
            raise ValueError("delta must be an integer >= 1")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")
        if not self.t_ffr > 0:
            raise ValueError("t_ffr must be > 0")

    def eta(self) -> float:
        """Effective per-interferer power multiplier (Delta - 1 + beta) / Delta."""
        return effective_interference_factor(self)


def effective_interference_factor(params: NetworkParams) -> float:
    """Consolidated interference power factor for SFR downlinks.

    One of every ``delta`` sub-bands carries boosted edge power ``beta * P``
    while the rest carry ``P``, so an average interferer transmits at
    ``(delta - 1 + beta) / delta`` times the base power.  Always in
    [1, beta].
    """
    return (params.delta - 1 + params.beta) / params.delta


# --- reuse schemes (tagged union) ------------------------------------------


@dataclass(frozen=True)
class NoReuse:
    """Universal reuse: every cell transmits on the full band."""


@dataclass(frozen=True)
class ReuseDelta:
    """Classical static reuse: each cell uses 1/delta of the band."""

    delta: int = 3

    def __post_init__(self) -> None:
        if int(self.delta) != self.delta or self.delta < 1:
            raise ValueError("delta must be an integer >= 1")


@dataclass(frozen=True)
class StrictFFR:
    """Common interior band plus delta disjoint edge bands (delta+1 total)."""

    delta: int = 3
    t_ffr: float = 1.0

    def __post_init__(self) -> None:
        if int(self.delta) != self.delta or self.delta < 1:
            raise ValueError("delta must be an integer >= 1")
        if not self.t_ffr > 0:
            raise ValueError("t_ffr must be > 0")

    @classmethod
    def from_params(cls, params: NetworkParams) -> "StrictFFR":
        return cls(delta=params.delta, t_ffr=params.t_ffr)


@dataclass(frozen=True)
class SFR:
    """Every cell uses all sub-bands; one of delta is edge-boosted to beta*P."""

    delta: int = 3
    beta: float = 1.0
    t_ffr: float = 1.0

    def __post_init__(self) -> None:
        if int(self.delta) != self.delta or self.delta < 1:
            raise ValueError("delta must be an integer >= 1")
        if not self.t_ffr > 0:
            raise ValueError("t_ffr must be > 0")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")

    @classmethod
    def from_params(cls, params: NetworkParams) -> "SFR":
        return cls(delta=params.delta, beta=params.beta, t_ffr=params.t_ffr)


ReuseScheme = Union[NoReuse, ReuseDelta, StrictFFR, SFR]


# --- deployments and downlink samples ---------------------------------------


@dataclass(frozen=True)
class Interferer:
    """One interfering base station as seen by the typical user."""

    distance: float
    fade: float
    power_class: UserClass = "interior"
    subband: int = 0

    def __post_init__(self) -> None:
        if not self.distance > 0:
            raise ValueError("interferer distance must be > 0")
        if not self.fade > 0:
            raise ValueError("fades must be > 0")


@dataclass(frozen=True)
class DownlinkSample:
    """Geometry and fading of one downlink snapshot.

    The serving base station is the nearest one; interferers on the user's
    sub-band are those whose ``subband`` matches ``subband`` here.
    """

    serving_distance: float
    serving_fade: float
    interferers: tuple[Interferer, ...] = field(default_factory=tuple)
    subband: int = 0

    def __post_init__(self) -> None:
        if not self.serving_distance > 0:
            raise ValueError("serving distance must be > 0")
        if not self.serving_fade > 0:
            raise ValueError("fades must be > 0")
        for z in self.interferers:
            if z.distance < self.serving_distance:
                raise ValueError("user must be served by its closest base station")


def sinr(
    sample: DownlinkSample,
    params: NetworkParams,
    scheme: ReuseScheme,
    user_class: UserClass = "interior",
) -> float:
    """Instantaneous SINR of the sampled downlink (linear).

    The numerator power is beta*P for an SFR edge user and P otherwise.
    Interference sums fade * distance**(-alpha) over interferers sharing the
    user's sub-band, weighted by beta*P for edge-powered interferers under
    SFR and by P otherwise.  A zero-noise sample with no co-channel
    interferers has no finite SINR and is rejected rather than mapped to a
    sentinel.
    """
    p = params.power
    boost = params.beta if (isinstance(scheme, SFR) and user_class == "edge") else 1.0
    signal = boost * p * sample.serving_fade * sample.serving_distance ** (-params.alpha)

    interference = 0.0
    any_active = False
    for z in sample.interferers:
        if z.subband != sample.subband:
            continue
        any_active = True
        w = params.beta if (isinstance(scheme, SFR) and z.power_class == "edge") else 1.0
        interference += w * p * z.fade * z.distance ** (-params.alpha)

    denom = params.sigma2 + interference
    if denom == 0.0 or (not any_active and params.sigma2 == 0.0):
        raise DegenerateRegimeError(
            "no co-channel interferers and zero noise: SINR is unbounded"
        )
    return signal / denom


def classify_user(pre_sinr: float, t_ffr: float) -> UserClass:
    """Edge iff the pre-assignment SINR falls below the threshold."""
    return "edge" if pre_sinr < t_ffr else "interior"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError("only positive linear values have a dB representation")
    return 10.0 * math.log10(x)
