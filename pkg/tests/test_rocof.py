"""Inertia sizing, the legacy headroom rule, and response scoring."""

import math

import numpy as np
import pytest

from essmarket import (
    ExponentialFit,
    Facility,
    ResponseTrace,
    Tech,
    accredited_quantity,
    fit_exponential,
    legacy_headroom_requirement,
    min_inertia_for_rocof,
    rocof_after_contingency,
    speed_multiplier,
)
from essmarket.errors import DegenerateTrace, InvariantViolation, NonPositiveLimit


def exp_trace(r_max, tau, t_end=10.0, step=0.5, noise=0.0, seed=0):
    t = np.arange(0.0, t_end + step / 2, step)
    y = r_max * (1.0 - np.exp(-t / tau))
    if noise > 0.0:
        y = y + np.random.default_rng(seed).normal(0.0, noise * r_max, len(t))
    return ResponseTrace(time_s=tuple(t), output_mw=tuple(y))


def test_min_inertia_reference_point():
    """300 MW at a 1.25 Hz/s limit needs 6,000 MW.s."""
    assert min_inertia_for_rocof(300.0, 1.25, 50.0) == pytest.approx(6000.0)
    assert min_inertia_for_rocof(0.0, 1.0) == 0.0


def test_min_inertia_halving_limit_doubles_requirement():
    assert min_inertia_for_rocof(300.0, 0.625) == pytest.approx(
        2.0 * min_inertia_for_rocof(300.0, 1.25)
    )


def test_min_inertia_nonpositive_limit():
    with pytest.raises(NonPositiveLimit):
        min_inertia_for_rocof(300.0, 0.0)


def test_rocof_round_trip():
    """Sizing then re-evaluating reproduces the limit to 1e-9 relative."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        dp = float(rng.uniform(1.0, 2000.0))
        limit = float(rng.uniform(0.05, 4.0))
        e_k = min_inertia_for_rocof(dp, limit)
        back = rocof_after_contingency(e_k, dp)
        assert abs(back - limit) <= 1e-9 * limit


def test_legacy_headroom_rule():
    """70% of the largest contingency, exactly."""
    assert legacy_headroom_requirement(340.0) == pytest.approx(238.0)
    assert legacy_headroom_requirement(1000.0) == pytest.approx(700.0)
    assert legacy_headroom_requirement(0.0) == 0.0
    for x in (1.0, 17.3, 512.0, 9999.0):
        assert legacy_headroom_requirement(x) == 0.70 * x


def test_fit_recovers_noiseless_exponential():
    """Samples of 10 (1 - e^(-t/2)) recover tau = 2, r_max = 10."""
    fit = fit_exponential(exp_trace(10.0, 2.0))
    assert fit.tau_s == pytest.approx(2.0, abs=0.01)
    assert fit.r_max == pytest.approx(10.0, abs=0.05)
    assert fit.rmse_mw < 1e-6 * fit.r_max
    assert not fit.saturated


def test_fit_degenerate_zero_trace():
    flat = ResponseTrace(time_s=(0.0, 1.0, 2.0, 3.0, 4.0), output_mw=(0.0,) * 5)
    with pytest.raises(DegenerateTrace):
        fit_exponential(flat)


def test_fit_step_response_saturates():
    """An instant step pins tau at the search floor and flags saturation.

    The squared error of the exponential family against a step decreases
    monotonically as tau shrinks, which the sweep below verifies before
    trusting the fit to land on the boundary.
    """
    t = tuple(np.arange(0.0, 5.5, 0.5))
    y = (0.0,) + (50.0,) * (len(t) - 1)
    trace = ResponseTrace(time_s=t, output_mw=y)

    from essmarket.rocof import _sse_for_tau

    taus = np.geomspace(0.01, 60.0, 40)
    sses = [_sse_for_tau(np.array(t), np.array(y), tau)[1] for tau in taus]
    assert all(a <= b + 1e-9 for a, b in zip(sses, sses[1:]))

    fit = fit_exponential(trace)
    assert fit.saturated
    assert fit.tau_s == pytest.approx(0.01)


def test_fit_scale_equivariance():
    """Scaling outputs by k scales r_max by k and leaves tau put."""
    base = fit_exponential(exp_trace(10.0, 3.0))
    scaled = fit_exponential(exp_trace(70.0, 3.0))
    assert scaled.r_max == pytest.approx(7.0 * base.r_max, rel=1e-3)
    assert scaled.tau_s == pytest.approx(base.tau_s, rel=1e-3)


def test_speed_multiplier_points():
    assert speed_multiplier(ExponentialFit(10.0, 6.0, 0.0), 6.0, 5.0) == pytest.approx(1.0)
    assert speed_multiplier(ExponentialFit(10.0, 0.6, 0.0), 6.0, 5.0) == pytest.approx(5.0)
    assert speed_multiplier(ExponentialFit(10.0, 12.0, 0.0), 6.0, 5.0) == pytest.approx(0.5)


def test_speed_multiplier_monotone_in_tau():
    taus = [0.1, 0.5, 1.0, 3.0, 6.0, 12.0, 40.0]
    vals = [speed_multiplier(ExponentialFit(1.0, tau, 0.0), 6.0, 5.0) for tau in taus]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_speed_multiplier_validation():
    with pytest.raises(InvariantViolation):
        speed_multiplier(ExponentialFit(1.0, 1.0, 0.0), tau_reference=0.0)
    with pytest.raises(InvariantViolation):
        speed_multiplier(ExponentialFit(1.0, 1.0, 0.0), m_max=0.5)


def test_accredited_quantity_min_then_scale():
    fac = Facility(id="B", tech=Tech.INVERTER_STORAGE, p_max=40.0)
    fit = ExponentialFit(r_max=50.0, tau_s=1.0, rmse_mw=0.0)
    assert accredited_quantity(fac, fit, 1.0) == pytest.approx(40.0)
    assert accredited_quantity(fac, fit, 0.0) == 0.0
    assert accredited_quantity(fac, fit, 1.0, headroom_mw=20.0) == pytest.approx(20.0)


def test_battery_credited_five_times_turbine():
    """A sub-second battery earns the full multiplier cap against a 6 s reference."""
    battery = fit_exponential(exp_trace(50.0, 0.1, t_end=2.0, step=0.05))
    turbine = fit_exponential(exp_trace(50.0, 6.0, t_end=30.0, step=0.5))
    m_batt = speed_multiplier(battery, tau_reference=6.0, m_max=5.0)
    m_turb = speed_multiplier(turbine, tau_reference=6.0, m_max=5.0)
    assert m_batt == pytest.approx(5.0)
    assert m_turb == pytest.approx(1.0, abs=1e-3)
    fac = Facility(id="B", tech=Tech.INVERTER_STORAGE, p_max=50.0)
    assert accredited_quantity(fac, battery, m_batt) == pytest.approx(250.0, rel=1e-3)


def test_fit_noise_tolerance():
    """1% additive noise keeps tau within 5%."""
    for tau in (0.5, 2.0, 6.0, 20.0):
        fit = fit_exponential(
            exp_trace(100.0, tau, t_end=5 * tau, step=tau / 20, noise=0.01, seed=3)
        )
        assert fit.tau_s == pytest.approx(tau, rel=0.05)


def test_trace_validation():
    with pytest.raises(InvariantViolation):
        ResponseTrace(time_s=(0.0, 1.0), output_mw=(0.0, 1.0))  # too few
    with pytest.raises(InvariantViolation):
        ResponseTrace(time_s=(1.0, 2.0, 3.0, 4.0, 5.0), output_mw=(0.0,) * 5)
    with pytest.raises(InvariantViolation):
        ResponseTrace(time_s=(0.0, 2.0, 1.0, 4.0, 5.0), output_mw=(0.0,) * 5)
    with pytest.raises(InvariantViolation):
        ResponseTrace(time_s=(0.0, 1.0, 2.0, 3.0, 4.0), output_mw=(0.0, 1.0, 2.0, math.inf, 4.0))
