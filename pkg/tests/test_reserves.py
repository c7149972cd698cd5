"""Forecast-error survival functions and reserve demand curves."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from essmarket import (
    ErrorSampleSet,
    RequirementMode,
    ReserveConfig,
    ReserveProductKind,
    ServiceKind,
    build_demand_curve,
    exceedance_probability,
    requirement_at_confidence,
    reserve_product,
)
from essmarket.errors import HorizonMismatch, InvariantViolation

samples_strategy = st.lists(
    st.floats(-500.0, 500.0, allow_nan=False, allow_infinity=False),
    min_size=1,
    max_size=60,
)


def errors(vals, horizon=30):
    return ErrorSampleSet(samples=tuple(vals), horizon_min=horizon)


def test_exceedance_by_direct_count():
    """2 of 4 samples exceed 20 MW."""
    s = errors([-50.0, 10.0, 30.0, 70.0])
    assert exceedance_probability(s, 20.0) == pytest.approx(0.5)


def test_exceedance_extremes():
    s = errors([-50.0, 10.0, 30.0, 70.0])
    assert exceedance_probability(s, 70.0) == 0.0
    assert exceedance_probability(s, 1000.0) == 0.0
    assert exceedance_probability(s, -60.0) == 1.0


@given(samples_strategy, st.floats(-600.0, 600.0, allow_nan=False))
def test_exceedance_bounded(vals, r):
    p = exceedance_probability(errors(vals), r)
    assert 0.0 <= p <= 1.0


@given(samples_strategy, st.floats(-600.0, 600.0), st.floats(0.0, 100.0))
def test_exceedance_non_increasing(vals, r, dr):
    s = errors(vals)
    assert exceedance_probability(s, r) >= exceedance_probability(s, r + dr)


def test_demand_curve_worked_example():
    """Four positive samples, cap 1000, 4 steps: prices 750/500/250/0."""
    curve = build_demand_curve(errors([10.0, 20.0, 30.0, 40.0]), 1000.0, 4)
    assert curve.breakpoints == ((10.0, 750.0), (20.0, 500.0), (30.0, 250.0), (40.0, 0.0))
    assert curve.price_at_zero == pytest.approx(1000.0)


def test_demand_curve_all_negative_is_empty():
    curve = build_demand_curve(errors([-5.0, -10.0, -0.5]), 1000.0, 4)
    assert curve.empty
    assert curve.segments() == ()


def test_demand_curve_single_sample():
    curve = build_demand_curve(errors([100.0]), 1000.0, 2)
    assert curve.breakpoints == ((100.0, 0.0),)
    assert curve.price_at_zero == pytest.approx(1000.0)


def test_demand_curve_segments_step_down():
    curve = build_demand_curve(errors([10.0, 20.0, 30.0, 40.0]), 1000.0, 4)
    assert curve.segments() == (
        (10.0, 1000.0),
        (10.0, 750.0),
        (10.0, 500.0),
        (10.0, 250.0),
    )


@settings(max_examples=200)
@given(samples_strategy, st.integers(2, 12))
def test_demand_curve_prices_are_cap_times_exceedance(vals, steps):
    cap = 2000.0
    s = errors(vals)
    curve = build_demand_curve(s, cap, steps)
    for r, p in curve.breakpoints:
        assert p == pytest.approx(cap * exceedance_probability(s, r))
    rs = [r for r, _ in curve.breakpoints]
    ps = [p for _, p in curve.breakpoints]
    assert all(b > a for a, b in zip(rs, rs[1:]))
    assert all(b <= a for a, b in zip(ps, ps[1:]))
    assert all(0.0 <= p <= cap for p in ps)


def test_requirement_at_confidence_examples():
    s = errors([10.0, 20.0, 30.0, 40.0])
    assert requirement_at_confidence(s, 0.75) == pytest.approx(30.0)
    assert requirement_at_confidence(s, 0.999) == pytest.approx(40.0)
    assert requirement_at_confidence(errors([-10.0, 10.0]), 0.5) == pytest.approx(10.0)


def test_requirement_confidence_bounds():
    with pytest.raises(InvariantViolation):
        requirement_at_confidence(errors([1.0]), 0.0)
    with pytest.raises(InvariantViolation):
        requirement_at_confidence(errors([1.0]), 1.0)


@given(samples_strategy)
def test_requirement_non_decreasing_in_confidence(vals):
    s = errors(vals)
    levels = [0.1, 0.3, 0.5, 0.7, 0.9, 0.99]
    reqs = [requirement_at_confidence(s, c) for c in levels]
    assert all(a <= b for a, b in zip(reqs, reqs[1:]))


@given(samples_strategy, st.floats(0.05, 0.95))
def test_outlier_never_lowers_requirement(vals, conf):
    s = errors(vals)
    outlier = max(max(vals), 0.0) + 1000.0
    s_plus = errors(list(vals) + [outlier])
    assert requirement_at_confidence(s_plus, conf) >= requirement_at_confidence(s, conf)


def test_reserve_product_callable_spinning():
    """Fixed quantity at the configured confidence quantile."""
    vals = list(range(-50, 51))  # -50..50 MW
    s = errors(vals)
    req = reserve_product(
        ReserveProductKind.CALLABLE_SPINNING, s, ReserveConfig(confidence=0.95)
    )
    assert req.service is ServiceKind.OPERATING_RESERVE
    assert req.mode is RequirementMode.FIXED
    assert req.quantity == pytest.approx(requirement_at_confidence(s, 0.95))


def test_reserve_product_firm_availability_curve():
    s = errors([5.0, 15.0, 25.0, -3.0])
    req = reserve_product(
        ReserveProductKind.FIRM_AVAILABILITY_30, s, ReserveConfig(price_cap=500.0, n_steps=3)
    )
    assert req.mode is RequirementMode.DEMAND_CURVE
    assert not req.curve.empty


def test_reserve_product_no_shortfall_risk_disables():
    s = errors([-5.0, -1.0, -20.0])
    req = reserve_product(ReserveProductKind.FIRM_AVAILABILITY_30, s, ReserveConfig())
    assert req.mode is RequirementMode.DISABLED


def test_reserve_product_horizon_mismatch():
    s30 = errors([1.0, 2.0], horizon=30)
    with pytest.raises(HorizonMismatch):
        reserve_product(ReserveProductKind.HEADROOM_5, s30, ReserveConfig())
    s5 = errors([1.0, 2.0], horizon=5)
    with pytest.raises(HorizonMismatch):
        reserve_product(ReserveProductKind.CALLABLE_SPINNING, s5, ReserveConfig())
    assert reserve_product(ReserveProductKind.HEADROOM_5, s5, ReserveConfig()).mode is (
        RequirementMode.DEMAND_CURVE
    )
