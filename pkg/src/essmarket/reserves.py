"""Operating-reserve sizing from historical forecast-error samples.

The empirical survival function of net-demand forecast errors prices
reserve: the value of the r-th MW is the scarcity price times the
probability the error exceeds r. Only positive errors (actual above
forecast, a supply shortfall) create demand for raise reserve; negative
errors are kept for reporting symmetry but never set a requirement.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .clearing import RequirementMode, ServiceRequirement
from .errors import HorizonMismatch, InvariantViolation
from .model import ServiceKind


@dataclass(frozen=True)
class ErrorSampleSet:
    """Forecast errors (actual - forecast, MW) for one look-ahead horizon."""

    samples: tuple[float, ...]
    horizon_min: int

    def __post_init__(self) -> None:
        if len(self.samples) < 1:
            raise InvariantViolation("need at least one error sample")
        if not all(math.isfinite(s) for s in self.samples):
            raise InvariantViolation("error samples must be finite")
        if self.horizon_min <= 0:
            raise InvariantViolation("horizon must be positive minutes")


@dataclass(frozen=True)
class ReserveDemandCurve:
    """Stepwise reserve demand: breakpoints (reserve_mw, price) plus the
    price of the first MW. Prices are non-increasing, quantities strictly
    increasing; an empty breakpoint list means no shortfall risk at all.
    """

    breakpoints: tuple[tuple[float, float], ...]
    price_at_zero: float = 0.0

    def __post_init__(self) -> None:
        rs = [r for r, _ in self.breakpoints]
        ps = [p for _, p in self.breakpoints]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise InvariantViolation("breakpoint quantities must be strictly increasing")
        if any(b > a for a, b in zip(ps, ps[1:])):
            raise InvariantViolation("breakpoint prices must be non-increasing")
        if ps and (self.price_at_zero < ps[0] or min(ps) < 0.0):
            raise InvariantViolation("prices must be non-increasing from price_at_zero and >= 0")

    @property
    def empty(self) -> bool:
        return not self.breakpoints

    def segments(self) -> tuple[tuple[float, float], ...]:
        """(width_mw, marginal value) blocks for the clearing program.

        Block k spans (r_{k-1}, r_k] and is valued at the price of its left
        edge; the first block starts at zero at price_at_zero. Zero-width
        and zero-value blocks are dropped.
        """
        out: list[tuple[float, float]] = []
        prev_r = 0.0
        prev_p = self.price_at_zero
        for r, p in self.breakpoints:
            width = r - prev_r
            if width > 0.0 and prev_p > 0.0:
                out.append((width, prev_p))
            prev_r, prev_p = r, p
        return tuple(out)

    def price_at(self, reserve_mw: float) -> float:
        """Marginal value of the next MW at a held reserve level."""
        if reserve_mw < 0.0:
            return self.price_at_zero
        price = self.price_at_zero
        for r, p in self.breakpoints:
            if reserve_mw < r:
                return price
            price = p
        return price


class ReserveProductKind(enum.Enum):
    """The three procurement variants for operating reserve."""

    FIRM_AVAILABILITY_30 = "FirmAvailability30"
    CALLABLE_SPINNING = "CallableSpinning"
    HEADROOM_5 = "Headroom5"


@dataclass(frozen=True)
class ReserveConfig:
    """Knobs for translating an error set into a reserve requirement."""

    price_cap: float = 15000.0
    n_steps: int = 10
    confidence: float = 0.95


def exceedance_probability(sample_set: ErrorSampleSet, r: float) -> float:
    """Empirical probability that the forecast error exceeds ``r`` MW."""
    s = np.asarray(sample_set.samples)
    return float(np.count_nonzero(s > r)) / len(sample_set.samples)


def build_demand_curve(
    sample_set: ErrorSampleSet, price_cap: float, n_steps: int
) -> ReserveDemandCurve:
    """Reserve demand curve with breakpoints at quantiles of positive errors.

    Breakpoints sit at the k/n_steps empirical quantiles (inverted-CDF
    convention) of the positive errors, each priced at
    price_cap * exceedance(r). With no positive errors there is nothing to
    protect against and the curve is explicitly empty.
    """
    if n_steps < 2:
        raise InvariantViolation("n_steps must be >= 2")
    if price_cap <= 0.0:
        raise InvariantViolation("price_cap must be > 0")
    positives = sorted(s for s in sample_set.samples if s > 0.0)
    if not positives:
        return ReserveDemandCurve(breakpoints=(), price_at_zero=0.0)
    m = len(positives)
    breakpoints: list[tuple[float, float]] = []
    for k in range(1, n_steps + 1):
        idx = max(0, math.ceil(k / n_steps * m) - 1)
        r = positives[idx]
        if breakpoints and breakpoints[-1][0] == r:
            continue
        breakpoints.append((r, price_cap * exceedance_probability(sample_set, r)))
    return ReserveDemandCurve(
        breakpoints=tuple(breakpoints),
        price_at_zero=price_cap * exceedance_probability(sample_set, 0.0),
    )


def requirement_at_confidence(sample_set: ErrorSampleSet, confidence: float) -> float:
    """Smallest positive error level covered at the given confidence.

    The smallest positive sample value r with exceedance(r) <= 1 -
    confidence; zero when no positive errors exist (no shortfall risk).
    """
    if not 0.0 < confidence < 1.0:
        raise InvariantViolation("confidence must lie strictly inside (0, 1)")
    positives = sorted(s for s in sample_set.samples if s > 0.0)
    if not positives:
        return 0.0
    threshold = 1.0 - confidence
    for r in positives:
        if exceedance_probability(sample_set, r) <= threshold:
            return r
    return positives[-1]


def reserve_product(
    kind: ReserveProductKind, sample_set: ErrorSampleSet, config: ReserveConfig
) -> ServiceRequirement:
    """Translate one reserve product variant into a clearing requirement.

    The firm-availability and 5-minute-headroom products clear against a
    demand curve; callable spinning reserve is a fixed quantity at the
    configured confidence level. Horizons must match: the 30-minute
    products need 30-minute errors, the headroom product 5-minute errors.
    """
    wanted = 5 if kind is ReserveProductKind.HEADROOM_5 else 30
    if sample_set.horizon_min != wanted:
        raise HorizonMismatch(
            f"{kind.value} needs {wanted}-minute samples, got {sample_set.horizon_min}-minute"
        )
    service = ServiceKind.OPERATING_RESERVE
    if kind is ReserveProductKind.CALLABLE_SPINNING:
        quantity = requirement_at_confidence(sample_set, config.confidence)
        if quantity <= 0.0:
            return ServiceRequirement(service, RequirementMode.DISABLED)
        return ServiceRequirement(service, RequirementMode.FIXED, quantity=quantity)
    curve = build_demand_curve(sample_set, config.price_cap, config.n_steps)
    if curve.empty:
        return ServiceRequirement(service, RequirementMode.DISABLED)
    return ServiceRequirement(service, RequirementMode.DEMAND_CURVE, curve=curve)
