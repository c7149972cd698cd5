"""Electricity market simulator co-optimizing energy with essential system services."""

from .clearing import (
    DispatchResult,
    RequirementMode,
    ServiceRequirement,
    clear_interval,
    compute_curtailment,
)
from .frequency import (
    FrequencyLimits,
    FrequencyTrace,
    Responder,
    SecurityVerdict,
    check_limits,
    rocof_after_contingency,
    simulate_contingency,
)
from .model import (
    Facility,
    MarketConfig,
    Registry,
    ServiceKind,
    ServiceOffer,
    Tech,
    total_system_inertia,
    validate_and_build_registry,
)
from .nomogram import (
    Combination,
    CommitmentDecision,
    NomogramTable,
    feasible_combinations,
    intervention_count,
    load_nomogram,
    save_nomogram,
    select_commitment,
)
from .reserves import (
    ErrorSampleSet,
    ReserveConfig,
    ReserveDemandCurve,
    ReserveProductKind,
    build_demand_curve,
    exceedance_probability,
    requirement_at_confidence,
    reserve_product,
)
from .rocof import (
    ExponentialFit,
    ResponseTrace,
    accredited_quantity,
    fit_exponential,
    legacy_headroom_requirement,
    min_inertia_for_rocof,
    speed_multiplier,
)

__version__ = "0.1.0"

__all__ = [
    "Combination",
    "CommitmentDecision",
    "DispatchResult",
    "ErrorSampleSet",
    "ExponentialFit",
    "Facility",
    "FrequencyLimits",
    "FrequencyTrace",
    "MarketConfig",
    "NomogramTable",
    "Registry",
    "RequirementMode",
    "ReserveConfig",
    "ReserveDemandCurve",
    "ReserveProductKind",
    "Responder",
    "ResponseTrace",
    "SecurityVerdict",
    "ServiceKind",
    "ServiceOffer",
    "ServiceRequirement",
    "Tech",
    "accredited_quantity",
    "build_demand_curve",
    "check_limits",
    "clear_interval",
    "compute_curtailment",
    "exceedance_probability",
    "feasible_combinations",
    "fit_exponential",
    "intervention_count",
    "legacy_headroom_requirement",
    "load_nomogram",
    "min_inertia_for_rocof",
    "requirement_at_confidence",
    "reserve_product",
    "rocof_after_contingency",
    "save_nomogram",
    "select_commitment",
    "simulate_contingency",
    "speed_multiplier",
    "total_system_inertia",
    "validate_and_build_registry",
]
