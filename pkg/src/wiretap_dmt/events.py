"""Rate plans and per-trial classification of the three failure events."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import AntennaConfig, ChannelRealization, as_snr_linear
from .exceptions import InvalidInputError
from .rates import RateBreakdown, SchemeKind, scheme_rates

__all__ = [
    "PlanKind",
    "RatePlan",
    "EventOutcome",
    "EVENTS",
    "target_secrecy_rate",
    "rate_plan_no_csit",
    "rate_plan_csit",
    "build_plan",
    "classify",
]

EVENTS = ("secrecy_rate_outage", "main_outage", "secrecy_not_achieved")


class PlanKind(str, enum.Enum):
    NO_CSIT = "no_csit"
    CSIT_ADAPTIVE = "csit_adaptive"
    CSIT_FIXED_MAIN = "csit_fixed_main"


@dataclass(frozen=True)
class RatePlan:
    """Target secret rate, dummy (confusion) rate and total codebook rate, in bits.

    ``r_total == r_s_target + r_dummy`` except for the fixed-main variant when
    the main channel cannot even carry ``r_s_target``; there the total rate is
    pinned to the main-channel mutual information and the dummy rate is 0.
    """

    r_s_target: float | np.ndarray
    r_dummy: float | np.ndarray
    r_total: float | np.ndarray
    adaptive: bool


@dataclass(frozen=True)
class EventOutcome:
    secrecy_rate_outage: bool | np.ndarray
    main_outage: bool | np.ndarray
    secrecy_not_achieved: bool | np.ndarray

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in EVENTS}


def target_secrecy_rate(r_s: float, snr) -> float:
    """``r_s * log2(snr)``, clamped at 0 below 0 dB."""
    if r_s < 0 or not math.isfinite(r_s):
        raise InvalidInputError(f"secret multiplexing gain must be >= 0, got {r_s}")
    snr = as_snr_linear(snr)
    return max(0.0, r_s * math.log2(snr)) if snr > 0 else 0.0


def rate_plan_no_csit(cfg: AntennaConfig, r_s: float, snr, margin: float = 0.0) -> RatePlan:
    """Fixed plan: ``(min(m, k) + margin) log2 snr`` dummy bits blind the eavesdropper.

    With ``margin=0`` the eavesdropper still decodes the dummy stream with a
    probability that does not vanish as snr grows (for ``k=1`` it tends to
    ``P(|h_e|^2 > 1)``). Any positive margin makes that probability decay.
    """
    if margin < 0 or not math.isfinite(margin):
        raise InvalidInputError(f"dummy-rate margin must be >= 0, got {margin}")
    target = target_secrecy_rate(r_s, snr)
    snr = as_snr_linear(snr)
    dummy = max(0.0, (min(cfg.m, cfg.k) + margin) * math.log2(snr)) if snr > 0 else 0.0
    return RatePlan(target, dummy, target + dummy, adaptive=False)


def rate_plan_csit(
    ch: ChannelRealization,
    r_s: float,
    snr,
    scheme: SchemeKind | str,
    *,
    fixed_main: bool = False,
    rates: RateBreakdown | None = None,
) -> RatePlan:
    """Plan whose dummy rate tracks the realized eavesdropper channel.

    By default the dummy rate equals the eavesdropper's mutual information, so
    secrecy is always attained and main-channel outage coincides with secrecy
    rate outage. With ``fixed_main=True`` the total rate equals the main
    channel's mutual information instead (main channel never in outage) and
    the dummy rate is ``[i_main - r_s_target]^+``.
    """
    if rates is None:
        rates = scheme_rates(scheme, ch, snr)
    target = target_secrecy_rate(r_s, snr)
    if fixed_main:
        total = np.asarray(rates.i_main, dtype=float)
        dummy = np.maximum(total - target, 0.0)
    else:
        dummy = np.asarray(rates.i_eve, dtype=float)
        total = target + dummy
    return RatePlan(target, _scalar(dummy), _scalar(total), adaptive=True)


def _scalar(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def build_plan(
    plan_kind: PlanKind | str,
    ch: ChannelRealization,
    r_s: float,
    snr,
    scheme: SchemeKind | str,
    rates: RateBreakdown | None = None,
) -> RatePlan:
    plan_kind = PlanKind(plan_kind)
    if plan_kind is PlanKind.NO_CSIT:
        return rate_plan_no_csit(ch.config, r_s, snr)
    return rate_plan_csit(
        ch, r_s, snr, scheme, fixed_main=plan_kind is PlanKind.CSIT_FIXED_MAIN, rates=rates
    )


def classify(
    ch: ChannelRealization,
    plan: RatePlan,
    scheme: SchemeKind | str,
    snr,
    rates: RateBreakdown | None = None,
) -> EventOutcome:
    """Evaluate the three failure events for each realization.

    * secrecy rate outage: ``i_main - i_eve < r_s_target`` (signed difference)
    * main outage: ``i_main < r_total``
    * secrecy not achieved: ``i_eve > r_dummy``
    """
    if rates is None:
        rates = scheme_rates(scheme, ch, snr)
    i_main = np.asarray(rates.i_main)
    i_eve = np.asarray(rates.i_eve)
    sro = (i_main - i_eve) < plan.r_s_target
    mo = i_main < plan.r_total
    sna = i_eve > plan.r_dummy
    return EventOutcome(_scalar(sro), _scalar(mo), _scalar(sna))
