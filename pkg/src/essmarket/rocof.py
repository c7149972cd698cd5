"""Inertia procurement service: requirement sizing, headroom rule, scoring.

A provider's measured response is compared against the family of ideal
exponential ramps r_max*(1 - exp(-t/tau)); the fitted speed tau is turned
into a multiplier relative to a reference turbine, which scales the MW the
facility may offer. Fast inverter equipment therefore earns credit well
above its raw MW.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrace, InvariantViolation, NoConvergence, NonPositiveLimit
from .model import Facility

TAU_SEARCH_LO_S = 0.01
TAU_SEARCH_HI_S = 60.0

#: Defaults for the speed-multiplier policy: the reference response time of
#: a large gas turbine and the crediting cap. Both are configurable.
TAU_REFERENCE_S = 6.0
MULTIPLIER_CAP = 5.0

_HEADROOM_FRACTION = 0.70


@dataclass(frozen=True)
class ResponseTrace:
    """Measured (time, MW) samples of one facility's response to a step."""

    time_s: tuple[float, ...]
    output_mw: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.time_s) != len(self.output_mw):
            raise InvariantViolation("time and output columns differ in length")
        if len(self.time_s) < 5:
            raise InvariantViolation("response trace needs at least 5 samples")
        if self.time_s[0] != 0.0:
            raise InvariantViolation("response trace must start at t = 0")
        if any(b < a for a, b in zip(self.time_s, self.time_s[1:])):
            raise InvariantViolation("sample times must be non-decreasing")
        if not all(math.isfinite(v) for v in self.output_mw):
            raise InvariantViolation("outputs must be finite")


@dataclass(frozen=True)
class ExponentialFit:
    """Best ideal-exponential match to a response trace."""

    r_max: float
    tau_s: float
    rmse_mw: float
    saturated: bool = False

    def __post_init__(self) -> None:
        if self.tau_s <= 0.0:
            raise InvariantViolation("tau must be > 0")
        if self.rmse_mw < 0.0:
            raise InvariantViolation("rmse must be >= 0")


def min_inertia_for_rocof(contingency_mw: float, max_rocof: float, f0: float = 50.0) -> float:
    """Kinetic energy (MW.s) needed to hold |df/dt| at ``max_rocof``.

    Inverse of the swing relation: dP * f0 / (2 * limit). Feeding the
    result back through rocof_after_contingency reproduces the limit.
    """
    if max_rocof <= 0.0:
        raise NonPositiveLimit(f"max_rocof must be > 0, got {max_rocof}")
    return abs(contingency_mw) * f0 / (2.0 * max_rocof)


def legacy_headroom_requirement(largest_contingency_mw: float) -> float:
    """Historical rule of thumb: 70% of the largest generation contingency."""
    if largest_contingency_mw < 0.0:
        raise InvariantViolation("contingency size must be >= 0")
    return _HEADROOM_FRACTION * largest_contingency_mw


def _sse_for_tau(t: np.ndarray, y: np.ndarray, tau: float) -> tuple[float, float]:
    """Closed-form best r_max for a given tau, and the squared error."""
    g = 1.0 - np.exp(-t / tau)
    gg = float(g @ g)
    if gg <= 0.0:
        return 0.0, float(y @ y)
    r_max = float((y @ g) / gg)
    resid = y - r_max * g
    return r_max, float(resid @ resid)


def fit_exponential(trace: ResponseTrace) -> ExponentialFit:
    """Least-squares (r_max, tau) over the ideal-exponential family.

    Golden-section search on tau over [0.01, 60] s with r_max eliminated in
    closed form at each tau (the residual is linear in r_max). A fit pinned
    at the lower search bound is flagged saturated: the response is faster
    than any tau the search distinguishes (a step, in the limit).
    """
    t = np.asarray(trace.time_s, dtype=float)
    y = np.asarray(trace.output_mw, dtype=float)
    if float(np.max(y)) <= 0.0:
        raise DegenerateTrace("trace has no positive output to fit")

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = TAU_SEARCH_LO_S, TAU_SEARCH_HI_S
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    _, fc = _sse_for_tau(t, y, c)
    _, fd = _sse_for_tau(t, y, d)
    for _ in range(200):
        if not (math.isfinite(fc) and math.isfinite(fd)):
            raise NoConvergence("non-finite residual during tau search")
        if hi - lo < 1e-10:
            break
        if fc < fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            _, fc = _sse_for_tau(t, y, c)
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            _, fd = _sse_for_tau(t, y, d)
    tau = 0.5 * (lo + hi)
    r_max, sse = _sse_for_tau(t, y, tau)
    # a trace faster than the sampling leaves the residual flat near the
    # floor; prefer the floor itself whenever it fits just as well
    _, sse_floor = _sse_for_tau(t, y, TAU_SEARCH_LO_S)
    if sse_floor <= sse + 1e-9 * float(y @ y + 1.0):
        tau = TAU_SEARCH_LO_S
        r_max, sse = _sse_for_tau(t, y, tau)
    return ExponentialFit(
        r_max=r_max,
        tau_s=tau,
        rmse_mw=math.sqrt(sse / len(trace.time_s)),
        saturated=tau <= TAU_SEARCH_LO_S * (1.0 + 1e-9),
    )


def speed_multiplier(
    fit: ExponentialFit,
    tau_reference: float = TAU_REFERENCE_S,
    m_max: float = MULTIPLIER_CAP,
) -> float:
    """Crediting multiplier for response speed: tau_ref / tau, clamped.

    Equals 1 at the reference speed, rewards faster (smaller tau) up to
    ``m_max``, and discounts slower response below 1. Monotone
    non-increasing in the fitted tau.
    """
    if tau_reference <= 0.0:
        raise InvariantViolation("tau_reference must be > 0")
    if m_max < 1.0:
        raise InvariantViolation("m_max must be >= 1")
    return min(max(tau_reference / fit.tau_s, 0.0), m_max)


def accredited_quantity(
    facility: Facility,
    fit: ExponentialFit,
    multiplier: float,
    headroom_mw: float | None = None,
) -> float:
    """MW the facility may offer into response markets after crediting.

    min(fitted asymptote, headroom) scaled by the speed multiplier;
    headroom defaults to the facility's dispatchable range p_max - p_min.
    """
    if multiplier < 0.0:
        raise InvariantViolation("multiplier must be >= 0")
    if headroom_mw is None:
        headroom_mw = facility.p_max - facility.p_min
    return min(fit.r_max, max(headroom_mw, 0.0)) * multiplier
