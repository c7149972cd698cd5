"""Post-contingency frequency simulation and security limit checks.

The system is a single bus governed by the aggregate swing equation

    (2 E_k / f0) d(df)/dt = -dP + sum_i R_i(t) - D * df

where E_k is stored kinetic energy (MW.s), dP the lost generation (MW),
R_i the primary responders and D load relief (MW/Hz, stabilizing).
Responders are either exponential ramps capacity*(1 - exp(-t/tau)) --
governor-style response -- or a pure detection delay followed by a step
(inverter fast response). Integration is fixed-step RK4 so a given input
always produces the bit-identical trace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidStep,
    InvariantViolation,
    NonPositiveInertia,
    ZeroInertiaWithContingency,
)


@dataclass(frozen=True)
class FrequencyLimits:
    """The three security limits checked after a generation contingency."""

    max_rocof: float
    min_nadir: float
    settling_band: tuple[float, float]
    f0: float = 50.0

    def __post_init__(self) -> None:
        if self.max_rocof <= 0.0:
            raise InvariantViolation("max_rocof must be > 0")
        if not self.min_nadir < self.f0:
            raise InvariantViolation("min_nadir must lie below nominal frequency")
        lo, hi = self.settling_band
        if lo > hi:
            raise InvariantViolation("settling band must be ordered [lo, hi]")
        if lo < self.min_nadir:
            raise InvariantViolation("settling band lower bound must be >= min_nadir")


@dataclass(frozen=True)
class Responder:
    """One cleared provider of primary response.

    Exactly one of ``tau_s`` (exponential ramp) or ``delay_s`` (pure delay
    then step) must be given.
    """

    capacity_mw: float
    tau_s: float | None = None
    delay_s: float | None = None

    def __post_init__(self) -> None:
        if self.capacity_mw < 0.0:
            raise InvariantViolation("responder capacity must be >= 0")
        if (self.tau_s is None) == (self.delay_s is None):
            raise InvariantViolation("responder needs exactly one of tau_s or delay_s")
        if self.tau_s is not None and self.tau_s <= 0.0:
            raise InvariantViolation("responder tau must be > 0")
        if self.delay_s is not None and self.delay_s < 0.0:
            raise InvariantViolation("responder delay must be >= 0")

    def output_mw(self, t: float) -> float:
        if self.tau_s is not None:
            return self.capacity_mw * (1.0 - np.exp(-t / self.tau_s)) if t > 0.0 else 0.0
        return self.capacity_mw if t >= self.delay_s else 0.0


@dataclass(frozen=True)
class FrequencyTrace:
    """Simulated frequency path with its extracted statistics."""

    time_s: np.ndarray
    frequency_hz: np.ndarray
    rocof_initial: float
    nadir_hz: float
    nadir_time_s: float
    settling_hz: float


@dataclass(frozen=True)
class SecurityVerdict:
    rocof_ok: bool
    nadir_ok: bool
    settling_ok: bool

    @property
    def overall(self) -> bool:
        return self.rocof_ok and self.nadir_ok and self.settling_ok


def rocof_after_contingency(inertia_mws: float, contingency_mw: float, f0: float = 50.0) -> float:
    """Initial |df/dt| in Hz/s after losing ``contingency_mw`` of generation.

    dP * f0 / (2 * E_k); the sign of the excursion is negative (frequency
    falls), the magnitude is returned.
    """
    if contingency_mw == 0.0:
        return 0.0
    if inertia_mws <= 0.0:
        raise ZeroInertiaWithContingency(
            f"contingency of {contingency_mw} MW with no stored energy"
        )
    return abs(contingency_mw) * f0 / (2.0 * inertia_mws)


def simulate_contingency(
    inertia_mws: float,
    contingency_mw: float,
    responders: list[Responder] | tuple[Responder, ...] = (),
    load_damping: float = 0.0,
    f0: float = 50.0,
    horizon_s: float = 40.0,
    dt_s: float = 0.005,
) -> FrequencyTrace:
    """Integrate the swing equation and extract ROCOF, nadir and settling.

    The initial ROCOF is taken from the first step, the nadir is the trace
    minimum, and the settling frequency is the mean over the final 10% of
    the horizon.
    """
    if dt_s <= 0.0 or dt_s > 0.01:
        raise InvalidStep(f"dt must lie in (0, 0.01] s, got {dt_s}")
    if horizon_s < 30.0:
        raise InvalidStep(f"horizon must be >= 30 s, got {horizon_s}")
    if inertia_mws <= 0.0:
        raise NonPositiveInertia("simulation requires inertia_mws > 0")
    if contingency_mw < 0.0:
        raise InvariantViolation("contingency_mw must be >= 0 (loss of generation)")
    if any(r.capacity_mw < 0.0 for r in responders):
        raise InvariantViolation("responder capacities must be >= 0")

    n_steps = int(round(horizon_s / dt_s))
    time = np.arange(n_steps + 1) * dt_s

    if contingency_mw == 0.0:
        # responders are event-triggered; no event leaves the system flat
        flat = np.full(n_steps + 1, f0)
        return FrequencyTrace(
            time_s=time, frequency_hz=flat, rocof_initial=0.0,
            nadir_hz=f0, nadir_time_s=0.0, settling_hz=f0,
        )

    dev = np.empty(n_steps + 1)
    dev[0] = 0.0

    gain = f0 / (2.0 * inertia_mws)

    def response(t: float) -> float:
        return sum(r.output_mw(t) for r in responders)

    def deriv(t: float, df: float) -> float:
        return gain * (-contingency_mw + response(t) - load_damping * df)

    y = 0.0
    for k in range(n_steps):
        t = k * dt_s
        k1 = deriv(t, y)
        k2 = deriv(t + 0.5 * dt_s, y + 0.5 * dt_s * k1)
        k3 = deriv(t + 0.5 * dt_s, y + 0.5 * dt_s * k2)
        k4 = deriv(t + dt_s, y + dt_s * k3)
        y = y + (dt_s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        dev[k + 1] = y

    freq = f0 + dev
    nadir_idx = int(np.argmin(freq))
    tail = max(1, int(round(0.1 * (n_steps + 1))))
    return FrequencyTrace(
        time_s=time,
        frequency_hz=freq,
        rocof_initial=float((freq[1] - freq[0]) / dt_s),
        nadir_hz=float(freq[nadir_idx]),
        nadir_time_s=float(time[nadir_idx]),
        settling_hz=float(np.mean(freq[-tail:])),
    )


def check_limits(trace: FrequencyTrace, limits: FrequencyLimits) -> SecurityVerdict:
    """Compare a trace's statistics to the three limits."""
    lo, hi = limits.settling_band
    return SecurityVerdict(
        rocof_ok=abs(trace.rocof_initial) <= limits.max_rocof,
        nadir_ok=trace.nadir_hz >= limits.min_nadir,
        settling_ok=lo <= trace.settling_hz <= hi,
    )
