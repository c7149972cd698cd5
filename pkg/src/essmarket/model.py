"""Facilities, the service catalog, offer books, and the market registry.

All quantities are in MW unless a field name says otherwise; inertia is
carried as kinetic energy in MW.s (inertia constant H [s] times MVA rating).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import (
    DuplicateFacilityId,
    InvariantViolation,
    PriceOutOfBounds,
    UnknownFacility,
    UnknownFacilityInOffer,
)


class Tech(enum.Enum):
    """Technology class of a registered facility."""

    SYNCHRONOUS = "Synchronous"
    INVERTER_VRE = "InverterVre"
    INVERTER_STORAGE = "InverterStorage"
    DEMAND_SIDE = "DemandSide"


class ServiceKind(enum.Enum):
    """Catalog of market services co-optimized with energy.

    The six contingency services pair raise/lower with the standard
    response times (fast 6 s, slow 60 s, delayed 300 s); fast frequency
    response sits strictly inside the fast window.
    """

    ENERGY = "Energy"
    REGULATION_RAISE = "RegulationRaise"
    REGULATION_LOWER = "RegulationLower"
    CONTINGENCY_RAISE_FAST = "ContingencyRaiseFast"
    CONTINGENCY_RAISE_SLOW = "ContingencyRaiseSlow"
    CONTINGENCY_RAISE_DELAYED = "ContingencyRaiseDelayed"
    CONTINGENCY_LOWER_FAST = "ContingencyLowerFast"
    CONTINGENCY_LOWER_SLOW = "ContingencyLowerSlow"
    CONTINGENCY_LOWER_DELAYED = "ContingencyLowerDelayed"
    FAST_FREQUENCY_RESPONSE = "FastFrequencyResponse"
    ROCOF_CONTROL = "RocofControl"
    OPERATING_RESERVE = "OperatingReserve"

    @property
    def response_time_s(self) -> float | None:
        """Nominal full-response time, None for services without one."""
        return _RESPONSE_TIMES.get(self)


_RESPONSE_TIMES = {
    ServiceKind.FAST_FREQUENCY_RESPONSE: 2.0,
    ServiceKind.CONTINGENCY_RAISE_FAST: 6.0,
    ServiceKind.CONTINGENCY_LOWER_FAST: 6.0,
    ServiceKind.CONTINGENCY_RAISE_SLOW: 60.0,
    ServiceKind.CONTINGENCY_LOWER_SLOW: 60.0,
    ServiceKind.CONTINGENCY_RAISE_DELAYED: 300.0,
    ServiceKind.CONTINGENCY_LOWER_DELAYED: 300.0,
}

#: Services that hold headroom above energy output (count against p_max).
RAISE_SERVICES = frozenset(
    {
        ServiceKind.REGULATION_RAISE,
        ServiceKind.CONTINGENCY_RAISE_FAST,
        ServiceKind.CONTINGENCY_RAISE_SLOW,
        ServiceKind.CONTINGENCY_RAISE_DELAYED,
        ServiceKind.FAST_FREQUENCY_RESPONSE,
        ServiceKind.OPERATING_RESERVE,
    }
)

#: Services that hold footroom below energy output.
LOWER_SERVICES = frozenset(
    {
        ServiceKind.REGULATION_LOWER,
        ServiceKind.CONTINGENCY_LOWER_FAST,
        ServiceKind.CONTINGENCY_LOWER_SLOW,
        ServiceKind.CONTINGENCY_LOWER_DELAYED,
    }
)


def _require(cond: bool, detail: str) -> None:
    if not cond:
        raise InvariantViolation(detail)


@dataclass(frozen=True)
class Facility:
    """A generator, storage, or demand-side resource.

    ``availability`` is an optional per-interval MW cap (used for variable
    renewables); absent, the facility is available at ``p_max`` everywhere.
    ``virtual_inertia_mws`` is a fixed MW.s credit for inverter equipment
    engineered to mimic stored rotational energy.
    """

    id: str
    tech: Tech
    p_max: float
    p_min: float = 0.0
    inertia_h: float = 0.0
    mva_rating: float = 0.0
    virtual_inertia_mws: float = 0.0
    droop: float | None = None
    pfr_tau: float | None = None
    commitment_cost: float = 0.0
    availability: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        f = f"facility {self.id!r}"
        _require(bool(self.id), "facility id must be non-empty")
        _require(self.p_max >= 0.0, f"{f}: p_max must be >= 0")
        _require(0.0 <= self.p_min <= self.p_max, f"{f}: need 0 <= p_min <= p_max")
        if self.p_min > 0.0:
            _require(self.tech is Tech.SYNCHRONOUS, f"{f}: p_min > 0 only for synchronous plant")
        _require(self.inertia_h >= 0.0, f"{f}: inertia_h must be >= 0")
        if self.tech is Tech.INVERTER_VRE:
            _require(self.inertia_h == 0.0, f"{f}: variable renewables carry no physical inertia")
        if self.inertia_h > 0.0:
            _require(self.mva_rating > 0.0, f"{f}: mva_rating must be > 0 when inertia_h > 0")
        _require(self.virtual_inertia_mws >= 0.0, f"{f}: virtual_inertia_mws must be >= 0")
        if self.virtual_inertia_mws > 0.0:
            _require(
                self.tech in (Tech.INVERTER_STORAGE, Tech.SYNCHRONOUS),
                f"{f}: virtual inertia only for storage or synchronous plant",
            )
        if self.droop is not None:
            _require(0.0 < self.droop <= 0.2, f"{f}: droop must lie in (0, 0.2]")
        if self.pfr_tau is not None:
            _require(self.pfr_tau > 0.0, f"{f}: pfr_tau must be > 0")
        _require(self.commitment_cost >= 0.0, f"{f}: commitment_cost must be >= 0")
        if self.commitment_cost > 0.0:
            _require(self.tech is Tech.SYNCHRONOUS, f"{f}: commitment_cost only for synchronous plant")
        if self.availability is not None:
            _require(
                all(math.isfinite(a) and a >= 0.0 for a in self.availability),
                f"{f}: availability values must be finite and >= 0",
            )

    @property
    def physical_inertia_mws(self) -> float:
        """Stored kinetic energy H x S in MW.s (synchronous plant only)."""
        if self.tech is Tech.SYNCHRONOUS:
            return self.inertia_h * self.mva_rating
        return 0.0

    def available_mw(self, interval: int) -> float:
        """Effective energy cap for one interval: min(p_max, availability)."""
        if self.availability is None:
            return self.p_max
        if not 0 <= interval < len(self.availability):
            raise InvariantViolation(
                f"facility {self.id!r}: interval {interval} outside availability trace"
            )
        return min(self.p_max, self.availability[interval])


@dataclass(frozen=True)
class ServiceOffer:
    """A priced quantity band of one service from one facility.

    ``interval`` of None means the offer stands for every interval.
    Energy prices are $/MWh; other services $/MW/h; inertia credits are
    offered in MW.s at $/MW.s/h.
    """

    facility_id: str
    service: ServiceKind
    quantity_mw: float
    price: float
    interval: int | None = None

    def __post_init__(self) -> None:
        _require(
            math.isfinite(self.quantity_mw) and self.quantity_mw >= 0.0,
            f"offer {self.facility_id}/{self.service.value}: quantity must be finite and >= 0",
        )
        _require(
            math.isfinite(self.price),
            f"offer {self.facility_id}/{self.service.value}: price must be finite",
        )


@dataclass(frozen=True)
class MarketConfig:
    """Market-wide pricing bounds and nominal frequency.

    ``violation_price`` is what a MW of unserved demand or reserve
    shortfall costs the objective; it defaults to the price cap.
    """

    price_floor: float = -1000.0
    price_cap: float = 15000.0
    f0: float = 50.0
    violation_price: float | None = None

    def __post_init__(self) -> None:
        _require(self.price_cap > self.price_floor, "price_cap must exceed price_floor")
        _require(self.f0 > 0.0, "nominal frequency must be > 0")

    @property
    def shortfall_price(self) -> float:
        return self.price_cap if self.violation_price is None else self.violation_price


class Registry:
    """Immutable set of facilities plus per-interval offer books.

    Construction is canonical: facilities are held sorted by id and offers
    sorted by (service, facility, price, quantity, interval), so identical
    inputs yield identical registries regardless of input order.
    """

    __slots__ = ("_facilities", "_offers_by_service", "config")

    def __init__(
        self,
        facilities: dict[str, Facility],
        offers_by_service: dict[ServiceKind, tuple[ServiceOffer, ...]],
        config: MarketConfig,
    ):
        self._facilities = facilities
        self._offers_by_service = offers_by_service
        self.config = config

    @property
    def facilities(self) -> tuple[Facility, ...]:
        return tuple(self._facilities.values())

    @property
    def facility_ids(self) -> tuple[str, ...]:
        return tuple(self._facilities.keys())

    def facility(self, facility_id: str) -> Facility:
        try:
            return self._facilities[facility_id]
        except KeyError:
            raise UnknownFacility(f"no facility with id {facility_id!r}") from None

    def __contains__(self, facility_id: str) -> bool:
        return facility_id in self._facilities

    def offers_for(self, interval: int, service: ServiceKind) -> tuple[ServiceOffer, ...]:
        """Offer book of one service for one interval, in canonical order."""
        return tuple(
            o
            for o in self._offers_by_service.get(service, ())
            if o.interval is None or o.interval == interval
        )

    def synchronous_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self._facilities.values() if f.tech is Tech.SYNCHRONOUS)

    def vre_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self._facilities.values() if f.tech is Tech.INVERTER_VRE)


def validate_and_build_registry(
    facilities: list[Facility],
    offers: list[ServiceOffer],
    config: MarketConfig,
) -> Registry:
    """Validate facilities and offers and freeze them into a Registry.

    Raises DuplicateFacilityId, UnknownFacilityInOffer, PriceOutOfBounds or
    InvariantViolation; facility-level invariants were already enforced by
    the Facility constructor.
    """
    by_id: dict[str, Facility] = {}
    for fac in facilities:
        if fac.id in by_id:
            raise DuplicateFacilityId(f"facility id {fac.id!r} appears more than once")
        by_id[fac.id] = fac
    facilities_sorted = dict(sorted(by_id.items()))

    for offer in offers:
        if offer.facility_id not in facilities_sorted:
            raise UnknownFacilityInOffer(
                f"offer for {offer.service.value} references unknown facility {offer.facility_id!r}"
            )
        if not (config.price_floor <= offer.price <= config.price_cap):
            raise PriceOutOfBounds(offer, config.price_floor, config.price_cap)
        fac = facilities_sorted[offer.facility_id]
        if offer.service in RAISE_SERVICES and offer.quantity_mw > fac.p_max:
            raise InvariantViolation(
                f"offer {offer.facility_id}/{offer.service.value}: raise quantity "
                f"{offer.quantity_mw} exceeds p_max {fac.p_max}"
            )

    books: dict[ServiceKind, list[ServiceOffer]] = {}
    for offer in offers:
        books.setdefault(offer.service, []).append(offer)
    frozen = {
        svc: tuple(
            sorted(
                lst,
                key=lambda o: (
                    o.facility_id,
                    o.price,
                    o.quantity_mw,
                    -1 if o.interval is None else o.interval,
                ),
            )
        )
        for svc, lst in sorted(books.items(), key=lambda kv: kv[0].value)
    }
    return Registry(facilities_sorted, frozen, config)


def total_system_inertia(registry: Registry, committed: set[str] | frozenset[str]) -> float:
    """Kinetic energy of a committed set in MW.s.

    Sums H x S over committed synchronous facilities plus the fixed virtual
    credit of any committed facility carrying one.
    """
    total = 0.0
    for fid in committed:
        fac = registry.facility(fid)
        total += fac.physical_inertia_mws + fac.virtual_inertia_mws
    return total
