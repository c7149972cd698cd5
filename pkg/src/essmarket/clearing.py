"""Per-interval co-optimized clearing of energy and system services.

Each interval solves one linear program: minimize offer cost over accepted
quantities subject to the energy balance, per-facility capacity coupling
(energy plus raise headroom within effective p_max, energy minus lower
footroom above the committed minimum), fixed service requirements, demand
curves for elastic services, and the inertia constraint linking committed
stored energy to offered credits. Clearing prices are the dual values.

Scarcity never raises: every requirement carries a violation variable
priced at the market shortfall price, so the program stays feasible and a
short market clears at the cap instead of crashing.

Per-facility results are then rationed proportionally within groups of
equal-priced offers of one service, so equally priced competitors share
the marginal dispatch by offered size instead of by input order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import InvariantViolation, MismatchedInterval
from .lp import LinearProgram
from .model import (
    LOWER_SERVICES,
    RAISE_SERVICES,
    MarketConfig,
    Registry,
    ServiceKind,
    Tech,
    total_system_inertia,
)

if TYPE_CHECKING:  # pragma: no cover
    from .reserves import ReserveDemandCurve

_TOL = 1e-7


class RequirementMode(enum.Enum):
    FIXED = "fixed"
    DEMAND_CURVE = "curve"
    DISABLED = "disabled"


@dataclass(frozen=True)
class ServiceRequirement:
    """How much of one service an interval must procure.

    ``quantity`` is MW (MW.s for the inertia service) in FIXED mode;
    DEMAND_CURVE mode carries the curve instead.
    """

    service: ServiceKind
    mode: RequirementMode
    quantity: float = 0.0
    curve: "ReserveDemandCurve | None" = None

    def __post_init__(self) -> None:
        if self.service is ServiceKind.ENERGY:
            raise InvariantViolation("energy demand is an input, not a requirement entry")
        if self.mode is RequirementMode.FIXED and self.quantity < 0.0:
            raise InvariantViolation(f"{self.service.value}: fixed quantity must be >= 0")
        if self.mode is RequirementMode.DEMAND_CURVE and self.curve is None:
            raise InvariantViolation(f"{self.service.value}: demand-curve mode needs a curve")


@dataclass(frozen=True)
class DispatchResult:
    """Cleared quantities, prices and accounting for one interval."""

    interval: int
    cleared: Mapping[ServiceKind, Mapping[str, float]]
    prices: Mapping[ServiceKind, float]
    committed: frozenset[str]
    curtailed_vre_mw: float
    shed_mw: float
    surplus_mw: float
    shortfall: Mapping[ServiceKind, float]
    curve_taken: Mapping[ServiceKind, float]
    objective_cost: float
    binding_constraints: tuple[str, ...]

    def cleared_total(self, service: ServiceKind) -> float:
        return sum(self.cleared.get(service, {}).values())

    def facility_cleared(self, facility_id: str, service: ServiceKind) -> float:
        return self.cleared.get(service, {}).get(facility_id, 0.0)


def clear_interval(
    registry: Registry,
    interval: int,
    demand_mw: float,
    requirements: Iterable[ServiceRequirement],
    committed: set[str] | frozenset[str],
    config: MarketConfig,
    nonsync_cap_mw: float | None = None,
) -> DispatchResult:
    """Clear one interval; always returns a result, pricing any shortage.

    ``committed`` selects which synchronous units participate (inverter and
    demand-side facilities always do). ``nonsync_cap_mw`` caps total
    renewable energy output when the commitment decision was directed.
    """
    if demand_mw < 0.0:
        raise InvariantViolation("demand must be >= 0")
    committed = frozenset(committed)
    for fid in committed:
        registry.facility(fid)  # raises UnknownFacility

    reqs: dict[ServiceKind, ServiceRequirement] = {}
    for req in requirements:
        if req.service in reqs:
            raise InvariantViolation(f"duplicate requirement for {req.service.value}")
        reqs[req.service] = req
    enabled = [
        s for s in ServiceKind
        if s is not ServiceKind.ENERGY and reqs.get(s, None) is not None
        and reqs[s].mode is not RequirementMode.DISABLED
    ]

    def participates(fid: str) -> bool:
        fac = registry.facility(fid)
        return fac.tech is not Tech.SYNCHRONOUS or fid in committed

    committed_inertia = total_system_inertia(registry, committed)

    lp = LinearProgram()
    offer_vars: list[tuple[int, str, ServiceKind, float, float]] = []  # var, fid, svc, q, price
    for svc in [ServiceKind.ENERGY] + enabled:
        for offer in registry.offers_for(interval, svc):
            if not participates(offer.facility_id):
                continue
            var = lp.add_var(offer.price, upper=offer.quantity_mw)
            offer_vars.append((var, offer.facility_id, svc, offer.quantity_mw, offer.price))

    shortfall_price = config.shortfall_price
    shed = lp.add_var(shortfall_price)
    surplus = lp.add_var(shortfall_price)

    balance = {v: 1.0 for v, _, s, _, _ in offer_vars if s is ServiceKind.ENERGY}
    balance[shed] = 1.0
    balance[surplus] = -1.0
    lp.add_row(balance, "==", demand_mw, "balance")

    shortfall_vars: dict[ServiceKind, int] = {}
    segment_vars: dict[ServiceKind, list[int]] = {}
    unpriced: list[ServiceKind] = []
    for svc in enabled:
        req = reqs[svc]
        constant = committed_inertia if svc is ServiceKind.ROCOF_CONTROL else 0.0
        members = {v: 1.0 for v, _, s, _, _ in offer_vars if s is svc}
        if req.mode is RequirementMode.FIXED:
            if req.quantity - constant <= 0.0:
                unpriced.append(svc)  # already covered by commitment: price 0
                continue
            sv = lp.add_var(shortfall_price)
            shortfall_vars[svc] = sv
            members[sv] = 1.0
            lp.add_row(members, ">=", req.quantity - constant, f"req:{svc.value}")
        else:
            segs = req.curve.segments()
            if not segs:
                unpriced.append(svc)
                continue
            seg_ids = []
            for width, value in segs:
                d = lp.add_var(-value, upper=width)
                members[d] = -1.0
                seg_ids.append(d)
            segment_vars[svc] = seg_ids
            lp.add_row(members, ">=", -constant, f"req:{svc.value}")

    floors: dict[str, float] = {}
    facilities_in_play = sorted({fid for _, fid, _, _, _ in offer_vars})
    for fid in facilities_in_play:
        fac = registry.facility(fid)
        up = {
            v: 1.0
            for v, f, s, _, _ in offer_vars
            if f == fid and (s is ServiceKind.ENERGY or s in RAISE_SERVICES)
        }
        if up:
            lp.add_row(up, "<=", fac.available_mw(interval), f"cap:{fid}")
        offered_energy = sum(
            q for _, f, s, q, _ in offer_vars if f == fid and s is ServiceKind.ENERGY
        )
        # committed plant holds its minimum; clamping to what is offered and
        # available keeps the program feasible for any input
        floor = (
            min(fac.p_min, offered_energy, fac.available_mw(interval))
            if fid in committed
            else 0.0
        )
        floors[fid] = floor
        has_lower = any(f == fid and s in LOWER_SERVICES for _, f, s, _, _ in offer_vars)
        if floor > 0.0 or has_lower:
            down = {
                v: 1.0 for v, f, s, _, _ in offer_vars if f == fid and s is ServiceKind.ENERGY
            }
            for v, f, s, _, _ in offer_vars:
                if f == fid and s in LOWER_SERVICES:
                    down[v] = -1.0
            lp.add_row(down, ">=", floor, f"floor:{fid}")

    if nonsync_cap_mw is not None:
        vre = {
            v: 1.0
            for v, f, s, _, _ in offer_vars
            if s is ServiceKind.ENERGY and registry.facility(f).tech is Tech.INVERTER_VRE
        }
        if vre:
            lp.add_row(vre, "<=", nonsync_cap_mw, "nonsync_cap")

    sol = lp.solve()

    alloc: dict[tuple[str, ServiceKind], float] = {}
    for v, fid, svc, _, _ in offer_vars:
        key = (fid, svc)
        alloc[key] = alloc.get(key, 0.0) + float(sol.x[v])

    _ration_equal_priced(
        alloc, offer_vars, sol.x, registry, interval, floors, nonsync_cap_mw
    )

    cleared: dict[ServiceKind, dict[str, float]] = {}
    for (fid, svc), q in alloc.items():
        cleared.setdefault(svc, {})[fid] = 0.0 if abs(q) < _TOL else q
    cleared = {
        svc: dict(sorted(by_fac.items())) for svc, by_fac in
        sorted(cleared.items(), key=lambda kv: _service_order(kv[0]))
    }

    prices: dict[ServiceKind, float] = {ServiceKind.ENERGY: sol.dual("balance")}
    for svc in enabled:
        prices[svc] = 0.0 if svc in unpriced else sol.dual(f"req:{svc.value}")

    shortfall = {
        svc: float(sol.x[v]) for svc, v in shortfall_vars.items() if sol.x[v] > _TOL
    }
    curve_taken = {
        svc: float(sum(sol.x[d] for d in ids)) for svc, ids in segment_vars.items()
    }

    curtailed = _vre_curtailment(registry, interval, cleared.get(ServiceKind.ENERGY, {}))

    binding = _binding_tags(
        registry, interval, floors, [s for s in enabled if s not in unpriced], reqs,
        committed_inertia, cleared, float(sol.x[shed]), float(sol.x[surplus]),
        shortfall, curve_taken, nonsync_cap_mw,
    )

    return DispatchResult(
        interval=interval,
        cleared=cleared,
        prices=prices,
        committed=committed,
        curtailed_vre_mw=curtailed,
        shed_mw=float(sol.x[shed]) if sol.x[shed] > _TOL else 0.0,
        surplus_mw=float(sol.x[surplus]) if sol.x[surplus] > _TOL else 0.0,
        shortfall=shortfall,
        curve_taken=curve_taken,
        objective_cost=sol.objective,
        binding_constraints=binding,
    )


def compute_curtailment(
    registry: Registry, result: DispatchResult, interval: int
) -> dict[str, float]:
    """Renewable energy left unused this interval, absolute and fractional."""
    if result.interval != interval:
        raise MismatchedInterval(
            f"result is for interval {result.interval}, not {interval}"
        )
    energy = result.cleared.get(ServiceKind.ENERGY, {})
    curtailed = _vre_curtailment(registry, interval, energy)
    total_avail = sum(
        registry.facility(fid).available_mw(interval) for fid in registry.vre_ids()
    )
    fraction = curtailed / total_avail if total_avail > 0.0 else 0.0
    return {"curtailed_mw": curtailed, "curtailed_fraction": fraction}


def _vre_curtailment(
    registry: Registry, interval: int, energy_cleared: Mapping[str, float]
) -> float:
    total = 0.0
    for fid in registry.vre_ids():
        avail = registry.facility(fid).available_mw(interval)
        total += max(0.0, avail - energy_cleared.get(fid, 0.0))
    return total


def _service_order(svc: ServiceKind) -> int:
    return list(ServiceKind).index(svc)


def _ration_equal_priced(
    alloc: dict[tuple[str, ServiceKind], float],
    offer_vars: list[tuple[int, str, ServiceKind, float, float]],
    x,
    registry: Registry,
    interval: int,
    floors: dict[str, float],
    nonsync_cap_mw: float | None,
) -> None:
    """Redistribute each equal-price offer group proportionally to size.

    Group totals (hence cost, balance and requirement rows) are preserved;
    per-facility headroom and footroom computed from the evolving
    allocation keep every coupling constraint satisfied. Energy groups
    mixing capped renewables with other plant are left at the solver
    allocation while a directed renewable cap is active, because moving
    energy between those members could breach the cap.
    """

    def floor_of(fid: str) -> float:
        return floors.get(fid, 0.0)

    def up_headroom(fid: str) -> float:
        fac = registry.facility(fid)
        used = sum(
            alloc.get((fid, s), 0.0)
            for s in ServiceKind
            if s is ServiceKind.ENERGY or s in RAISE_SERVICES
        )
        return max(0.0, fac.available_mw(interval) - used)

    def down_headroom(fid: str) -> float:
        energy = alloc.get((fid, ServiceKind.ENERGY), 0.0)
        lowers = sum(alloc.get((fid, s), 0.0) for s in LOWER_SERVICES)
        return max(0.0, energy - floor_of(fid) - lowers)

    for svc in ServiceKind:
        in_svc = [(v, fid, q, p) for v, fid, s, q, p in offer_vars if s is svc]
        if not in_svc:
            continue
        for price in sorted({p for _, _, _, p in in_svc}):
            group = [(v, fid, q) for v, fid, q, p in in_svc if p == price]
            fids = sorted({fid for _, fid, _ in group})
            if len(fids) < 2:
                continue
            if svc is ServiceKind.ENERGY and nonsync_cap_mw is not None:
                capped = {
                    fid for fid in fids
                    if registry.facility(fid).tech is Tech.INVERTER_VRE
                }
                if capped and capped != set(fids):
                    continue
            weight = {fid: 0.0 for fid in fids}
            cur = {fid: 0.0 for fid in fids}
            for v, fid, q in group:
                weight[fid] += q
                cur[fid] += float(x[v])
            total = sum(cur.values())
            lo: dict[str, float] = {}
            hi: dict[str, float] = {}
            for fid in fids:
                if svc is ServiceKind.ENERGY:
                    lowers = sum(alloc.get((fid, s), 0.0) for s in LOWER_SERVICES)
                    other = alloc.get((fid, svc), 0.0) - cur[fid]
                    lo[fid] = max(0.0, floor_of(fid) + lowers - other)
                    hi[fid] = min(weight[fid], cur[fid] + up_headroom(fid))
                elif svc in RAISE_SERVICES:
                    lo[fid] = 0.0
                    hi[fid] = min(weight[fid], cur[fid] + up_headroom(fid))
                elif svc in LOWER_SERVICES:
                    lo[fid] = 0.0
                    hi[fid] = min(weight[fid], cur[fid] + down_headroom(fid))
                else:  # inertia credits have no MW coupling
                    lo[fid] = 0.0
                    hi[fid] = weight[fid]
                lo[fid] = min(lo[fid], cur[fid])
                hi[fid] = max(hi[fid], cur[fid])
            shares = _waterfill(total, weight, lo, hi)
            for fid in fids:
                key = (fid, svc)
                alloc[key] = alloc.get(key, 0.0) - cur[fid] + shares[fid]


def _waterfill(
    total: float, weight: dict[str, float], lo: dict[str, float], hi: dict[str, float]
) -> dict[str, float]:
    """Allocate ``total`` within [lo, hi] boxes, proportional to weight."""
    out = dict(lo)
    remaining = total - sum(lo.values())
    if remaining <= _TOL:
        return out
    active = sorted(k for k in weight if hi[k] - out[k] > _TOL)
    while remaining > _TOL and active:
        wsum = sum(weight[k] for k in active)
        if wsum <= 0.0:
            share = {k: remaining / len(active) for k in active}
        else:
            share = {k: remaining * weight[k] / wsum for k in active}
        next_active = []
        for k in active:
            room = hi[k] - out[k]
            take = min(share[k], room)
            out[k] += take
            remaining -= take
            if hi[k] - out[k] > _TOL and take >= share[k] - _TOL and wsum > 0.0:
                next_active.append(k)
            elif hi[k] - out[k] > _TOL and wsum <= 0.0:
                next_active.append(k)
        if next_active == active and remaining > _TOL:
            break  # nothing capped this pass yet nothing left to place
        active = next_active
    return out


def _binding_tags(
    registry: Registry,
    interval: int,
    floors: dict[str, float],
    enabled: list[ServiceKind],
    reqs: dict[ServiceKind, ServiceRequirement],
    committed_inertia: float,
    cleared: Mapping[ServiceKind, Mapping[str, float]],
    shed: float,
    surplus: float,
    shortfall: Mapping[ServiceKind, float],
    curve_taken: Mapping[ServiceKind, float],
    nonsync_cap_mw: float | None,
) -> tuple[str, ...]:
    """Constraint tags active in the final allocation, for diagnostics."""
    tags: list[str] = []
    tol = 1e-6
    for svc in enabled:
        req = reqs[svc]
        provided = sum(cleared.get(svc, {}).values())
        constant = committed_inertia if svc is ServiceKind.ROCOF_CONTROL else 0.0
        if req.mode is RequirementMode.FIXED:
            target = max(0.0, req.quantity - constant)
            if provided + shortfall.get(svc, 0.0) <= target + tol and target > 0.0:
                tags.append(f"req:{svc.value}")
        else:
            if abs(provided + constant - curve_taken.get(svc, 0.0)) <= tol:
                tags.append(f"req:{svc.value}")
    for fid in sorted({f for by_fac in cleared.values() for f in by_fac}):
        fac = registry.facility(fid)
        used = sum(
            cleared.get(s, {}).get(fid, 0.0)
            for s in ServiceKind
            if s is ServiceKind.ENERGY or s in RAISE_SERVICES
        )
        if used >= fac.available_mw(interval) - tol and used > tol:
            tags.append(f"cap:{fid}")
        floor = floors.get(fid, 0.0)
        if floor > 0.0:
            energy = cleared.get(ServiceKind.ENERGY, {}).get(fid, 0.0)
            lowers = sum(cleared.get(s, {}).get(fid, 0.0) for s in LOWER_SERVICES)
            if energy - lowers <= floor + tol:
                tags.append(f"floor:{fid}")
    if nonsync_cap_mw is not None:
        vre_energy = sum(
            q for f, q in cleared.get(ServiceKind.ENERGY, {}).items()
            if registry.facility(f).tech is Tech.INVERTER_VRE
        )
        if vre_energy >= nonsync_cap_mw - tol:
            tags.append("nonsync_cap")
    if shed > tol:
        tags.append("shed")
    if surplus > tol:
        tags.append("surplus")
    for svc in sorted(shortfall, key=_service_order):
        tags.append(f"shortfall:{svc.value}")
    return tuple(tags)
