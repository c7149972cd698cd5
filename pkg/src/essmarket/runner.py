"""Multi-interval orchestration: commit, size reserves, clear, verify.

Each interval runs the same four stages: the transfer-limit table picks
the synchronous commitment for the forecast renewable level, forecast
errors set the operating-reserve requirement, the market clears, and the
cleared portfolio is checked against the post-contingency frequency
limits (committed stored energy plus cleared inertia credits against the
scenario's reference contingency).

Intervals are independent of each other, so they could be evaluated
concurrently; they are run sequentially here because the determinism
contract (identical scenario and seed give bit-identical reports) is
worth more than the negligible speed-up on these problem sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .clearing import DispatchResult, RequirementMode, ServiceRequirement, clear_interval
from .errors import EssMarketError
from .frequency import (
    FrequencyLimits,
    FrequencyTrace,
    Responder,
    SecurityVerdict,
    check_limits,
    simulate_contingency,
)
from .model import ServiceKind, Tech, total_system_inertia
from .nomogram import CommitmentDecision, intervention_count, select_commitment
from .reserves import ReserveDemandCurve, reserve_product
from .rocof import min_inertia_for_rocof
from .runner_types import IntervalRecord, RunReport  # re-exported below
from .scenario import Scenario

__all__ = ["IntervalRecord", "RunReport", "run"]


def run(scenario: Scenario) -> RunReport:
    """Simulate every interval of a scenario and aggregate the report."""
    demand = np.asarray(scenario.demand, dtype=float)
    if scenario.noise_sigma_mw > 0.0 and len(demand):
        rng = np.random.default_rng(scenario.seed)
        demand = np.maximum(
            0.0, demand + rng.normal(0.0, scenario.noise_sigma_mw, len(demand))
        )

    requirements = list(scenario.requirements)
    if scenario.reserve_kind is not None:
        requirements.append(
            reserve_product(scenario.reserve_kind, scenario.error_set, scenario.reserve_config)
        )

    rocof_enabled = any(
        r.service is ServiceKind.ROCOF_CONTROL and r.mode is not RequirementMode.DISABLED
        for r in requirements
    )
    if scenario.inertia_floor_mws is not None:
        inertia_floor = scenario.inertia_floor_mws
    elif rocof_enabled:
        inertia_floor = 0.0  # the market procures the credits
    else:
        inertia_floor = min_inertia_for_rocof(
            scenario.contingency.size_mw, scenario.limits.max_rocof, scenario.config.f0
        )

    curves = {
        r.service: r.curve for r in requirements if r.mode is RequirementMode.DEMAND_CURVE
    }

    records = []
    for i in range(scenario.n_intervals):
        try:
            records.append(
                _run_interval(scenario, i, float(demand[i]), requirements, inertia_floor)
            )
        except EssMarketError as exc:
            raise type(exc)(f"interval {i}: {exc}") from exc

    return _aggregate(scenario, records, curves)


def _run_interval(
    scenario: Scenario,
    i: int,
    demand_mw: float,
    requirements: list[ServiceRequirement],
    inertia_floor: float,
) -> IntervalRecord:
    reg = scenario.registry
    vre_available = sum(reg.facility(fid).available_mw(i) for fid in reg.vre_ids())

    decision = select_commitment(scenario.nomogram, reg, vre_available, inertia_floor)
    nonsync_cap = decision.limit_mw if decision.directed else None

    dispatch = clear_interval(
        reg, i, demand_mw, requirements, decision.committed, scenario.config,
        nonsync_cap_mw=nonsync_cap,
    )

    inertia = total_system_inertia(reg, decision.committed)
    inertia += dispatch.cleared_total(ServiceKind.ROCOF_CONTROL)

    cont = scenario.contingency
    if cont.size_mw > 0.0 and inertia <= 0.0:
        # nothing spinning and no credits: record the interval insecure
        trace = _flat_trace(scenario.limits, cont)
        verdict = SecurityVerdict(False, False, False)
    else:
        trace = simulate_contingency(
            inertia_mws=max(inertia, 1e-9),
            contingency_mw=cont.size_mw,
            responders=_responders(scenario, dispatch),
            load_damping=cont.load_damping_mw_per_hz,
            f0=scenario.config.f0,
            horizon_s=cont.horizon_s,
            dt_s=cont.dt_s,
        )
        verdict = check_limits(trace, scenario.limits)

    return IntervalRecord(
        interval=i,
        demand_mw=demand_mw,
        vre_available_mw=vre_available,
        decision=decision,
        dispatch=dispatch,
        trace=trace,
        verdict=verdict,
    )


def _responders(scenario: Scenario, dispatch: DispatchResult) -> list[Responder]:
    """Cleared contingency response mapped onto the swing-model responders.

    Fast inverter response is a detection delay then a step; governor-style
    services ramp exponentially, the 6 s market at each facility's own time
    constant and the 60 s market at the configured slow constant. The
    5-minute market restores headroom after the horizon ends and is not
    simulated.
    """
    cont = scenario.contingency
    reg = scenario.registry
    out: list[Responder] = []
    for fid, mw in sorted(dispatch.cleared.get(ServiceKind.FAST_FREQUENCY_RESPONSE, {}).items()):
        if mw > 0.0:
            out.append(Responder(mw, delay_s=cont.ffr_delay_s))
    for fid, mw in sorted(dispatch.cleared.get(ServiceKind.CONTINGENCY_RAISE_FAST, {}).items()):
        if mw > 0.0:
            tau = reg.facility(fid).pfr_tau or cont.default_pfr_tau_s
            out.append(Responder(mw, tau_s=tau))
    for fid, mw in sorted(dispatch.cleared.get(ServiceKind.CONTINGENCY_RAISE_SLOW, {}).items()):
        if mw > 0.0:
            out.append(Responder(mw, tau_s=cont.slow_tau_s))
    return out


def _flat_trace(limits: FrequencyLimits, cont) -> FrequencyTrace:
    time = np.array([0.0, cont.horizon_s])
    freq = np.array([limits.f0, limits.f0])
    return FrequencyTrace(
        time_s=time, frequency_hz=freq, rocof_initial=0.0,
        nadir_hz=limits.f0, nadir_time_s=0.0, settling_hz=limits.f0,
    )


def _aggregate(
    scenario: Scenario,
    records: list[IntervalRecord],
    curves: Mapping[ServiceKind, ReserveDemandCurve],
) -> RunReport:
    interval_h = scenario.interval_minutes / 60.0
    total_avail = sum(r.vre_available_mw for r in records)
    total_curtailed = sum(r.dispatch.curtailed_vre_mw for r in records)
    total_cost = sum(
        r.dispatch.objective_cost * interval_h + r.decision.commitment_cost for r in records
    )
    return RunReport(
        scenario_name=scenario.name,
        market_mode=scenario.market_mode,
        interval_minutes=scenario.interval_minutes,
        limits=scenario.limits,
        registry=scenario.registry,
        records=tuple(records),
        curves=dict(curves),
        curtailed_fraction=(total_curtailed / total_avail if total_avail > 0.0 else 0.0),
        intervention_count=intervention_count([r.decision for r in records]),
        insecure_intervals=sum(1 for r in records if not r.verdict.overall),
        total_shed_mwh=sum(r.dispatch.shed_mw for r in records) * interval_h,
        total_cost=total_cost,
    )
