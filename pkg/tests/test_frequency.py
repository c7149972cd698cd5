"""Swing-equation simulation against closed-form solutions."""

import math

import numpy as np
import pytest

from essmarket import (
    FrequencyLimits,
    Responder,
    check_limits,
    rocof_after_contingency,
    simulate_contingency,
)
from essmarket.errors import (
    InvalidStep,
    NonPositiveInertia,
    ZeroInertiaWithContingency,
)

F0 = 50.0


def closed_form_nadir(e_k, dp, r, tau, f0=F0):
    """Analytic nadir for one unclipped exponential responder, no damping.

    The deviation integrates to (f0/2E) [(R - dP) t - R tau (1 - e^(-t/tau))];
    its minimum sits where R (1 - e^(-t/tau)) = dP.
    """
    assert r > dp
    t_star = tau * math.log(r / (r - dp))
    dev = (f0 / (2.0 * e_k)) * ((r - dp) * t_star - tau * dp)
    return f0 + dev, t_star


def test_rocof_reference_point():
    """300 MW lost against 6,000 MW.s at 50 Hz gives 1.25 Hz/s."""
    assert rocof_after_contingency(6000.0, 300.0, 50.0) == pytest.approx(1.25)


def test_rocof_zero_contingency():
    assert rocof_after_contingency(6000.0, 0.0) == 0.0
    assert rocof_after_contingency(0.0, 0.0) == 0.0


def test_rocof_scaling():
    """Doubling stored energy halves the initial ROCOF."""
    assert rocof_after_contingency(12000.0, 300.0) == pytest.approx(
        rocof_after_contingency(6000.0, 300.0) / 2.0
    )


def test_rocof_zero_inertia_raises():
    with pytest.raises(ZeroInertiaWithContingency):
        rocof_after_contingency(0.0, 300.0)


def test_nadir_matches_closed_form():
    """Simulated nadir within 1e-3 Hz of the analytic single-responder value."""
    e_k, dp, r, tau = 6000.0, 300.0, 450.0, 4.0
    trace = simulate_contingency(
        e_k, dp, [Responder(r, tau_s=tau)], horizon_s=40.0, dt_s=0.005
    )
    nadir_ref, t_star = closed_form_nadir(e_k, dp, r, tau)
    assert trace.nadir_hz == pytest.approx(nadir_ref, abs=1e-3)
    assert trace.nadir_time_s == pytest.approx(t_star, abs=0.05)


def test_first_step_rocof_near_analytic():
    e_k, dp = 8000.0, 400.0
    trace = simulate_contingency(e_k, dp, [Responder(600.0, tau_s=6.0)], dt_s=0.005)
    analytic = rocof_after_contingency(e_k, dp)
    assert abs(trace.rocof_initial) == pytest.approx(analytic, rel=0.02)
    assert trace.rocof_initial < 0.0  # generation loss pulls frequency down


def test_no_responders_ramps_linearly():
    """Constant imbalance, no damping: the trace is a straight ramp."""
    e_k, dp = 5000.0, 100.0
    trace = simulate_contingency(e_k, dp, [], horizon_s=30.0, dt_s=0.01)
    slope = dp * F0 / (2.0 * e_k)
    expected_end = F0 - slope * 30.0
    assert trace.frequency_hz[-1] == pytest.approx(expected_end, abs=1e-9)
    assert trace.nadir_hz == pytest.approx(expected_end, abs=1e-9)
    assert trace.nadir_time_s == pytest.approx(30.0)


def test_zero_contingency_flat_trace():
    trace = simulate_contingency(5000.0, 0.0, [Responder(100.0, tau_s=2.0)])
    assert np.all(trace.frequency_hz == F0)
    assert trace.rocof_initial == 0.0
    assert trace.settling_hz == F0


def test_settling_is_tail_mean():
    """With response exceeding the loss, frequency recovers and settles."""
    r, dp, damping = 400.0, 200.0, 50.0
    trace = simulate_contingency(
        6000.0, dp, [Responder(r, tau_s=3.0)], load_damping=damping
    )
    assert trace.settling_hz > trace.nadir_hz
    n = len(trace.frequency_hz)
    tail = trace.frequency_hz[-(n // 10):]
    assert trace.settling_hz == pytest.approx(float(np.mean(tail)), abs=1e-6)
    # open-loop response settles where -dP + R = D * df
    assert trace.settling_hz == pytest.approx(F0 + (r - dp) / damping, abs=0.05)


def test_delayed_step_responder():
    """A pure-delay responder leaves the first instants uncompensated."""
    delayed = simulate_contingency(
        6000.0, 300.0, [Responder(350.0, delay_s=0.5)], dt_s=0.005
    )
    instant = simulate_contingency(
        6000.0, 300.0, [Responder(350.0, delay_s=0.0)], dt_s=0.005
    )
    assert delayed.nadir_hz < instant.nadir_hz


def test_nadir_monotone_in_support():
    """More response capacity or more stored energy never deepens the nadir."""
    base = simulate_contingency(6000.0, 300.0, [Responder(400.0, tau_s=4.0)])
    more_r = simulate_contingency(
        6000.0, 300.0, [Responder(400.0, tau_s=4.0), Responder(100.0, tau_s=4.0)]
    )
    more_e = simulate_contingency(9000.0, 300.0, [Responder(400.0, tau_s=4.0)])
    assert more_r.nadir_hz >= base.nadir_hz
    assert more_e.nadir_hz >= base.nadir_hz


def test_halving_dt_converged():
    """Nadir shifts by < 1e-3 Hz when the step halves (reference case)."""
    kw = dict(
        inertia_mws=6000.0,
        contingency_mw=300.0,
        responders=[Responder(450.0, tau_s=4.0)],
        horizon_s=40.0,
    )
    coarse = simulate_contingency(dt_s=0.01, **kw)
    fine = simulate_contingency(dt_s=0.005, **kw)
    assert abs(coarse.nadir_hz - fine.nadir_hz) < 1e-3


def test_step_and_horizon_validation():
    with pytest.raises(InvalidStep):
        simulate_contingency(6000.0, 300.0, [], dt_s=0.02)
    with pytest.raises(InvalidStep):
        simulate_contingency(6000.0, 300.0, [], horizon_s=10.0)
    with pytest.raises(NonPositiveInertia):
        simulate_contingency(0.0, 300.0, [])


def test_check_limits_flags():
    limits = FrequencyLimits(
        max_rocof=1.0, min_nadir=49.5, settling_band=(49.85, 50.15), f0=F0
    )
    # 300 MW on 6,000 MW.s: |rocof| = 1.25 breaches the 1.0 Hz/s limit
    trace = simulate_contingency(6000.0, 300.0, [Responder(500.0, tau_s=1.0)])
    verdict = check_limits(trace, limits)
    assert not verdict.rocof_ok
    assert not verdict.overall

    flat = simulate_contingency(6000.0, 0.0, [])
    ok = check_limits(flat, limits)
    assert ok.rocof_ok and ok.nadir_ok and ok.settling_ok and ok.overall


def test_check_limits_nadir_direct_comparison():
    limits = FrequencyLimits(max_rocof=3.0, min_nadir=49.5, settling_band=(49.5, 50.5))
    trace = simulate_contingency(6000.0, 300.0, [Responder(320.0, tau_s=6.0)])
    assert trace.nadir_hz < 49.5
    assert not check_limits(trace, limits).nadir_ok
