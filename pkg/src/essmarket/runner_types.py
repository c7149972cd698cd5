"""Result records produced by a simulation run."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .clearing import DispatchResult
from .frequency import FrequencyLimits, FrequencyTrace, SecurityVerdict
from .model import Registry, ServiceKind
from .nomogram import CommitmentDecision
from .reserves import ReserveDemandCurve


@dataclass(frozen=True)
class IntervalRecord:
    """Everything decided and observed in one dispatch interval."""

    interval: int
    demand_mw: float
    vre_available_mw: float
    decision: CommitmentDecision
    dispatch: DispatchResult
    trace: FrequencyTrace
    verdict: SecurityVerdict


@dataclass(frozen=True)
class RunReport:
    """Per-interval records plus the run-level aggregates.

    Every aggregate is recomputable from the records: the curtailed
    fraction is summed curtailment over summed availability, the
    intervention count tallies directed commitment decisions, and the
    total cost is dispatch cost at interval length plus commitment costs.
    """

    scenario_name: str
    market_mode: str
    interval_minutes: int
    limits: FrequencyLimits
    registry: Registry
    records: tuple[IntervalRecord, ...]
    curves: Mapping[ServiceKind, ReserveDemandCurve]
    curtailed_fraction: float
    intervention_count: int
    insecure_intervals: int
    total_shed_mwh: float
    total_cost: float

    @property
    def price_duration(self) -> dict[ServiceKind, tuple[float, ...]]:
        """Clearing prices per service, sorted high to low across intervals."""
        out: dict[ServiceKind, tuple[float, ...]] = {}
        for svc in ServiceKind:
            prices = [r.dispatch.prices[svc] for r in self.records if svc in r.dispatch.prices]
            if prices:
                out[svc] = tuple(sorted(prices, reverse=True))
        return out
