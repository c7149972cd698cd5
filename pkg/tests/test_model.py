"""Facility/offer validation and registry construction."""

import pytest

from essmarket import (
    Facility,
    MarketConfig,
    ServiceKind,
    ServiceOffer,
    Tech,
    total_system_inertia,
    validate_and_build_registry,
)
from essmarket.errors import (
    DuplicateFacilityId,
    InvariantViolation,
    PriceOutOfBounds,
    UnknownFacility,
    UnknownFacilityInOffer,
)

CFG = MarketConfig()  # floor -1000, cap 15000


def gas(fid="G1", p_max=200.0, p_min=50.0, h=4.0, s=250.0, cost=500.0):
    return Facility(
        id=fid, tech=Tech.SYNCHRONOUS, p_max=p_max, p_min=p_min,
        inertia_h=h, mva_rating=s, commitment_cost=cost, pfr_tau=4.0,
    )


def test_minimal_registry():
    """One synchronous facility with one valid energy offer registers."""
    reg = validate_and_build_registry(
        [gas()], [ServiceOffer("G1", ServiceKind.ENERGY, 200.0, 40.0)], CFG
    )
    assert len(reg.facilities) == 1
    assert reg.facility("G1").p_max == 200.0
    assert len(reg.offers_for(0, ServiceKind.ENERGY)) == 1


def test_price_above_cap_rejected():
    """An energy offer at $20,000/MWh breaches the $15,000 cap."""
    offer = ServiceOffer("G1", ServiceKind.ENERGY, 10.0, 20_000.0)
    with pytest.raises(PriceOutOfBounds):
        validate_and_build_registry([gas()], [offer], CFG)


def test_price_below_floor_rejected():
    offer = ServiceOffer("G1", ServiceKind.ENERGY, 10.0, -1500.0)
    with pytest.raises(PriceOutOfBounds):
        validate_and_build_registry([gas()], [offer], CFG)


def test_unknown_facility_in_offer():
    offer = ServiceOffer("X", ServiceKind.ENERGY, 10.0, 40.0)
    with pytest.raises(UnknownFacilityInOffer):
        validate_and_build_registry([gas()], [offer], CFG)


def test_duplicate_facility_id():
    with pytest.raises(DuplicateFacilityId):
        validate_and_build_registry([gas(), gas()], [], CFG)


def test_raise_offer_capped_by_p_max():
    offer = ServiceOffer("G1", ServiceKind.CONTINGENCY_RAISE_FAST, 250.0, 10.0)
    with pytest.raises(InvariantViolation):
        validate_and_build_registry([gas(p_max=200.0)], [offer], CFG)


def test_vre_carries_no_physical_inertia():
    with pytest.raises(InvariantViolation):
        Facility(id="W", tech=Tech.INVERTER_VRE, p_max=100.0, inertia_h=2.0, mva_rating=100.0)


def test_virtual_inertia_only_storage_or_synchronous():
    with pytest.raises(InvariantViolation):
        Facility(id="W", tech=Tech.INVERTER_VRE, p_max=100.0, virtual_inertia_mws=100.0)
    Facility(id="B", tech=Tech.INVERTER_STORAGE, p_max=100.0, virtual_inertia_mws=3000.0)


def test_p_min_only_synchronous():
    with pytest.raises(InvariantViolation):
        Facility(id="B", tech=Tech.INVERTER_STORAGE, p_max=100.0, p_min=10.0)


def test_contingency_response_times_map_to_markets():
    """Six contingency services pair 6 s / 60 s / 300 s raise and lower."""
    expect = {
        ServiceKind.CONTINGENCY_RAISE_FAST: 6.0,
        ServiceKind.CONTINGENCY_LOWER_FAST: 6.0,
        ServiceKind.CONTINGENCY_RAISE_SLOW: 60.0,
        ServiceKind.CONTINGENCY_LOWER_SLOW: 60.0,
        ServiceKind.CONTINGENCY_RAISE_DELAYED: 300.0,
        ServiceKind.CONTINGENCY_LOWER_DELAYED: 300.0,
    }
    for svc, t in expect.items():
        assert svc.response_time_s == t
    assert (
        ServiceKind.FAST_FREQUENCY_RESPONSE.response_time_s
        < ServiceKind.CONTINGENCY_RAISE_FAST.response_time_s
    )


def test_total_inertia_definition():
    """H x S summed over committed synchronous plant."""
    reg = validate_and_build_registry(
        [gas("A", h=3.0, s=500.0), gas("B", h=4.0, s=250.0)], [], CFG
    )
    assert total_system_inertia(reg, {"A", "B"}) == pytest.approx(2500.0)
    assert total_system_inertia(reg, set()) == 0.0


def test_virtual_inertia_credit_counts():
    """A storage facility engineered for 3,000 MW.s contributes exactly that."""
    bess = Facility(id="HPR", tech=Tech.INVERTER_STORAGE, p_max=150.0, virtual_inertia_mws=3000.0)
    reg = validate_and_build_registry([bess], [], CFG)
    assert total_system_inertia(reg, {"HPR"}) == pytest.approx(3000.0)


def test_total_inertia_additive_over_disjoint_sets():
    facs = [gas(f"G{i}", h=2.0 + i, s=100.0 * (i + 1), cost=0.0) for i in range(4)]
    reg = validate_and_build_registry(facs, [], CFG)
    a, b = {"G0", "G1"}, {"G2", "G3"}
    assert total_system_inertia(reg, a | b) == pytest.approx(
        total_system_inertia(reg, a) + total_system_inertia(reg, b)
    )


def test_total_inertia_unknown_facility():
    reg = validate_and_build_registry([gas()], [], CFG)
    with pytest.raises(UnknownFacility):
        total_system_inertia(reg, {"NOPE"})


def test_registry_construction_is_order_independent():
    """Same inputs in any order produce the same iteration order."""
    facs = [gas("B"), gas("A"), gas("C")]
    offers = [
        ServiceOffer("C", ServiceKind.ENERGY, 10.0, 30.0),
        ServiceOffer("A", ServiceKind.ENERGY, 10.0, 20.0),
    ]
    r1 = validate_and_build_registry(facs, offers, CFG)
    r2 = validate_and_build_registry(list(reversed(facs)), list(reversed(offers)), CFG)
    assert r1.facility_ids == r2.facility_ids == ("A", "B", "C")
    assert r1.offers_for(0, ServiceKind.ENERGY) == r2.offers_for(0, ServiceKind.ENERGY)


def test_interval_scoped_offers():
    offers = [
        ServiceOffer("G1", ServiceKind.ENERGY, 10.0, 30.0, interval=2),
        ServiceOffer("G1", ServiceKind.ENERGY, 20.0, 25.0),
    ]
    reg = validate_and_build_registry([gas()], offers, CFG)
    assert len(reg.offers_for(0, ServiceKind.ENERGY)) == 1
    assert len(reg.offers_for(2, ServiceKind.ENERGY)) == 2


def test_availability_trace_caps_effective_output():
    wind = Facility(
        id="W", tech=Tech.INVERTER_VRE, p_max=100.0, availability=(80.0, 120.0)
    )
    assert wind.available_mw(0) == 80.0
    assert wind.available_mw(1) == 100.0  # capped by p_max
