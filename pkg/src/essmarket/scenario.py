"""Scenario files: a TOML description referencing delimited trace tables.

A scenario is one self-describing file; demand, availability and
forecast-error traces live in delimited tables next to it (or inline as
arrays). Every load error carries a locator: the file and line for parse
failures, the dotted field path for semantic ones.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .clearing import RequirementMode, ServiceRequirement
from .errors import EssMarketError, ParseError, ValidationError
from .frequency import FrequencyLimits
from .model import (
    Facility,
    MarketConfig,
    Registry,
    ServiceKind,
    ServiceOffer,
    Tech,
    validate_and_build_registry,
)
from .nomogram import NomogramTable, load_nomogram
from .reserves import (
    ErrorSampleSet,
    ReserveConfig,
    ReserveProductKind,
    build_demand_curve,
)
from .rocof import min_inertia_for_rocof
from .tables import read_error_samples, read_single_column

#: Dispatch interval length implied by the market mode.
MODE_INTERVAL_MIN = {"NEM": 5, "WEM": 30}

_MODE_PRICE_CAP = {"NEM": 15000.0, "WEM": 382.0}
_DEFAULT_PRICE_FLOOR = -1000.0


@dataclass(frozen=True)
class ContingencySpec:
    """The reference contingency and the response model parameters."""

    size_mw: float
    load_damping_mw_per_hz: float = 0.0
    horizon_s: float = 40.0
    dt_s: float = 0.005
    ffr_delay_s: float = 0.25
    default_pfr_tau_s: float = 6.0
    slow_tau_s: float = 30.0


@dataclass(frozen=True)
class Scenario:
    name: str
    market_mode: str
    n_intervals: int
    demand: tuple[float, ...]
    registry: Registry
    requirements: tuple[ServiceRequirement, ...]
    limits: FrequencyLimits
    contingency: ContingencySpec
    nomogram: NomogramTable
    reserve_kind: ReserveProductKind | None
    reserve_config: ReserveConfig
    error_set: ErrorSampleSet | None
    inertia_floor_mws: float | None
    noise_sigma_mw: float
    seed: int
    config: MarketConfig

    @property
    def interval_minutes(self) -> int:
        return MODE_INTERVAL_MIN[self.market_mode]


class _Section:
    """Typed access into parsed TOML with dotted-path error locators."""

    def __init__(self, data: dict, path: str):
        self.data = data
        self.path = path

    def _fail(self, key: str, message: str):
        raise ValidationError(f"{self.path}.{key}" if self.path else key, message)

    def get(self, key, default=None):
        return self.data.get(key, default)

    def require(self, key):
        if key not in self.data:
            self._fail(key, "required field is missing")
        return self.data[key]

    def number(self, key, default=None, required=False, minimum=None):
        raw = self.require(key) if required else self.data.get(key, default)
        if raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            self._fail(key, f"expected a number, got {type(raw).__name__}")
        value = float(raw)
        if minimum is not None and value < minimum:
            self._fail(key, f"must be >= {minimum}, got {value}")
        return value

    def integer(self, key, default=None, required=False, minimum=None):
        raw = self.require(key) if required else self.data.get(key, default)
        if raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, int):
            self._fail(key, f"expected an integer, got {type(raw).__name__}")
        if minimum is not None and raw < minimum:
            self._fail(key, f"must be >= {minimum}, got {raw}")
        return raw

    def text(self, key, default=None, required=False, choices=None):
        raw = self.require(key) if required else self.data.get(key, default)
        if raw is None:
            return None
        if not isinstance(raw, str):
            self._fail(key, f"expected a string, got {type(raw).__name__}")
        if choices is not None and raw not in choices:
            self._fail(key, f"must be one of {sorted(choices)}, got {raw!r}")
        return raw

    def section(self, key, required=False) -> "_Section":
        raw = self.require(key) if required else self.data.get(key, {})
        if not isinstance(raw, dict):
            self._fail(key, "expected a table")
        return _Section(raw, f"{self.path}.{key}" if self.path else key)

    def sections(self, key) -> list["_Section"]:
        raw = self.data.get(key, [])
        if not isinstance(raw, list) or any(not isinstance(x, dict) for x in raw):
            self._fail(key, "expected an array of tables")
        prefix = f"{self.path}.{key}" if self.path else key
        return [_Section(x, f"{prefix}[{i}]") for i, x in enumerate(raw)]


def _load_trace(sec: _Section, key: str, base: Path, n: int, what: str) -> tuple[float, ...]:
    """A per-interval trace given inline as an array or as a file reference."""
    raw = sec.require(key)
    if isinstance(raw, str):
        _, values = read_single_column(base / raw)
    elif isinstance(raw, list):
        if any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw):
            sec._fail(key, "inline trace must contain only numbers")
        values = [float(v) for v in raw]
    else:
        sec._fail(key, "expected a file name or an inline array")
    if len(values) != n:
        sec._fail(key, f"{what} must have {n} rows, found {len(values)}")
    return tuple(values)


_TECHS = {t.value: t for t in Tech}
_SERVICES = {s.value: s for s in ServiceKind}


def _parse_facility(sec: _Section, base: Path, n: int) -> Facility:
    tech_name = sec.text("tech", required=True)
    if tech_name not in _TECHS:
        sec._fail("tech", f"unknown technology {tech_name!r}; valid: {sorted(_TECHS)}")
    availability = None
    if "availability" in sec.data:
        availability = _load_trace(sec, "availability", base, n, "availability trace")
    droop = sec.number("droop")
    pfr_tau = sec.number("pfr_tau_s")
    try:
        return Facility(
            id=sec.text("id", required=True),
            tech=_TECHS[tech_name],
            p_max=sec.number("p_max_mw", required=True, minimum=0.0),
            p_min=sec.number("p_min_mw", 0.0, minimum=0.0),
            inertia_h=sec.number("inertia_h_s", 0.0, minimum=0.0),
            mva_rating=sec.number("mva_rating", 0.0, minimum=0.0),
            virtual_inertia_mws=sec.number("virtual_inertia_mws", 0.0, minimum=0.0),
            droop=droop,
            pfr_tau=pfr_tau,
            commitment_cost=sec.number("commitment_cost", 0.0, minimum=0.0),
            availability=availability,
        )
    except EssMarketError as exc:
        raise ValidationError(sec.path, str(exc)) from None


def _parse_service(sec: _Section, key: str) -> ServiceKind:
    name = sec.text(key, required=True)
    if name not in _SERVICES:
        sec._fail(key, f"unknown service {name!r}; valid: {sorted(_SERVICES)}")
    return _SERVICES[name]


def load_scenario(path: str | Path) -> Scenario:
    """Parse and fully validate one scenario file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ParseError(path, "file not found") from None
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(path, str(exc)) from None
    base = path.parent
    root = _Section(data, "")

    market = root.section("market", required=True)
    mode = market.text("mode", required=True, choices=set(MODE_INTERVAL_MIN))
    n = market.integer("intervals", required=True, minimum=0)
    price_cap = market.number("price_cap", _MODE_PRICE_CAP[mode])
    price_floor = market.number("price_floor", _DEFAULT_PRICE_FLOOR)
    f0 = market.number("f0_hz", 50.0, minimum=1.0)
    try:
        config = MarketConfig(price_floor=price_floor, price_cap=price_cap, f0=f0)
    except EssMarketError as exc:
        raise ValidationError("market", str(exc)) from None

    cont_sec = root.section("contingency", required=True)
    contingency = ContingencySpec(
        size_mw=cont_sec.number("size_mw", required=True, minimum=0.0),
        load_damping_mw_per_hz=cont_sec.number("load_damping_mw_per_hz", 0.0, minimum=0.0),
        horizon_s=cont_sec.number("horizon_s", 40.0, minimum=30.0),
        dt_s=cont_sec.number("dt_s", 0.005),
        ffr_delay_s=cont_sec.number("ffr_delay_s", 0.25, minimum=0.0),
        default_pfr_tau_s=cont_sec.number("default_pfr_tau_s", 6.0),
        slow_tau_s=cont_sec.number("slow_tau_s", 30.0),
    )

    lim_sec = root.section("limits", required=True)
    band = lim_sec.require("settling_band_hz")
    if (
        not isinstance(band, list)
        or len(band) != 2
        or any(isinstance(b, bool) or not isinstance(b, (int, float)) for b in band)
    ):
        lim_sec._fail("settling_band_hz", "expected [low_hz, high_hz]")
    try:
        limits = FrequencyLimits(
            max_rocof=lim_sec.number("max_rocof_hz_per_s", required=True),
            min_nadir=lim_sec.number("min_nadir_hz", required=True),
            settling_band=(float(band[0]), float(band[1])),
            f0=f0,
        )
    except EssMarketError as exc:
        raise ValidationError("limits", str(exc)) from None

    traces = root.section("traces", required=True)
    demand = _load_trace(traces, "demand", base, n, "demand trace")
    if any(d < 0.0 for d in demand):
        traces._fail("demand", "demand must be >= 0 everywhere")

    facilities = [_parse_facility(s, base, n) for s in root.sections("facilities")]

    offers = []
    for sec in root.sections("offers"):
        svc = _parse_service(sec, "service")
        try:
            offers.append(
                ServiceOffer(
                    facility_id=sec.text("facility", required=True),
                    service=svc,
                    quantity_mw=sec.number("quantity_mw", required=True, minimum=0.0),
                    price=sec.number("price", required=True),
                    interval=sec.integer("interval"),
                )
            )
        except EssMarketError as exc:
            raise ValidationError(sec.path, str(exc)) from None

    try:
        registry = validate_and_build_registry(facilities, offers, config)
    except EssMarketError as exc:
        raise ValidationError("offers", str(exc)) from None

    commitment = root.section("commitment", required=True)
    table_file = commitment.text("table", required=True)
    nomogram = load_nomogram(base / table_file)
    for combo in nomogram.combinations:
        for unit in sorted(combo.required_units):
            if unit not in registry:
                raise ValidationError(
                    "commitment.table",
                    f"combination {combo.label} references unknown facility {unit!r}",
                )
    inertia_floor = commitment.number("inertia_floor_mws", None, minimum=0.0)

    error_set = None
    reserve_kind = None
    reserve_config = ReserveConfig(price_cap=price_cap)
    reserve = root.section("reserve")
    if reserve.data:
        horizon, samples = read_error_samples(base / reserve.text("errors", required=True))
        error_set = ErrorSampleSet(samples=tuple(samples), horizon_min=horizon)
        product = reserve.text("product")
        if product is not None:
            kinds = {k.value: k for k in ReserveProductKind}
            if product not in kinds:
                reserve._fail("product", f"unknown product {product!r}; valid: {sorted(kinds)}")
            reserve_kind = kinds[product]
        reserve_config = ReserveConfig(
            price_cap=reserve.number("price_cap", price_cap, minimum=0.0),
            n_steps=reserve.integer("curve_steps", 10, minimum=2),
            confidence=reserve.number("confidence", 0.95),
        )

    requirements: list[ServiceRequirement] = []
    seen: set[ServiceKind] = set()
    for sec in root.sections("requirements"):
        svc = _parse_service(sec, "service")
        if svc is ServiceKind.ENERGY:
            sec._fail("service", "energy demand comes from the demand trace")
        if svc in seen:
            sec._fail("service", f"duplicate requirement for {svc.value}")
        seen.add(svc)
        mode_name = sec.text("mode", "fixed", choices={"fixed", "curve", "disabled"})
        if mode_name == "disabled":
            requirements.append(ServiceRequirement(svc, RequirementMode.DISABLED))
        elif mode_name == "curve":
            if svc is ServiceKind.ROCOF_CONTROL:
                sec._fail("mode", "the inertia service clears as a fixed quantity here")
            if error_set is None:
                sec._fail("mode", "curve mode needs a [reserve] block with error samples")
            curve = build_demand_curve(
                error_set, reserve_config.price_cap, reserve_config.n_steps
            )
            if curve.empty:
                requirements.append(ServiceRequirement(svc, RequirementMode.DISABLED))
            else:
                requirements.append(
                    ServiceRequirement(svc, RequirementMode.DEMAND_CURVE, curve=curve)
                )
        else:
            if svc is ServiceKind.ROCOF_CONTROL:
                quantity = sec.number("quantity_mws", None, minimum=0.0)
                if quantity is None:
                    quantity = min_inertia_for_rocof(
                        contingency.size_mw, limits.max_rocof, f0
                    )
            else:
                quantity = sec.number("quantity_mw", required=True, minimum=0.0)
            requirements.append(
                ServiceRequirement(svc, RequirementMode.FIXED, quantity=quantity)
            )
    if reserve_kind is not None and ServiceKind.OPERATING_RESERVE in seen:
        raise ValidationError(
            "reserve.product",
            "operating reserve is configured both as a product and as a requirement entry",
        )

    noise = root.section("noise")
    return Scenario(
        name=root.text("name", path.stem),
        market_mode=mode,
        n_intervals=n,
        demand=demand,
        registry=registry,
        requirements=tuple(requirements),
        limits=limits,
        contingency=contingency,
        nomogram=nomogram,
        reserve_kind=reserve_kind,
        reserve_config=reserve_config,
        error_set=error_set,
        inertia_floor_mws=inertia_floor,
        noise_sigma_mw=noise.number("demand_sigma_mw", 0.0, minimum=0.0),
        seed=noise.integer("seed", 0),
        config=config,
    )
