"""Command-line interface.

Subcommands: run a scenario end to end (tables plus figures), validate a
scenario file, score a measured response trace, build a reserve demand
curve from forecast errors, and query a transfer-limit table. Exit code 0
on success, 1 for input validation failures, 2 for runtime errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .errors import (
    DuplicateFacilityId,
    EssMarketError,
    InvariantViolation,
    ParseError,
    PriceOutOfBounds,
    UnknownFacilityInOffer,
    ValidationError,
)
from .fixtures import fixture_path
from .nomogram import feasible_combinations, load_nomogram
from .reserves import ErrorSampleSet, build_demand_curve
from .rocof import ResponseTrace, fit_exponential, speed_multiplier
from .scenario import load_scenario
from .tables import fmt6, read_error_samples, read_two_columns, write_table

_VALIDATION_ERRORS = (
    ParseError,
    ValidationError,
    InvariantViolation,
    DuplicateFacilityId,
    UnknownFacilityInOffer,
    PriceOutOfBounds,
)


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EssMarketError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="essmarket",
        description="Electricity market simulator with essential system services.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate a scenario and write the report")
    p_run.add_argument("scenario", help="scenario file (bundled name or path)")
    p_run.add_argument("-o", "--out", required=True, help="output directory")
    p_run.add_argument("--no-plots", action="store_true", help="skip figure rendering")
    p_run.set_defaults(handler=_cmd_run)

    p_val = sub.add_parser("validate", help="check a scenario file and exit")
    p_val.add_argument("scenario", help="scenario file (bundled name or path)")
    p_val.set_defaults(handler=_cmd_validate)

    p_score = sub.add_parser(
        "score-rocof", help="fit a measured response trace and report its crediting"
    )
    p_score.add_argument("trace", help="two-column time_s,output_mw table")
    p_score.add_argument("--tau-ref", type=float, default=6.0, help="reference tau (s)")
    p_score.add_argument("--m-max", type=float, default=5.0, help="multiplier cap")
    p_score.set_defaults(handler=_cmd_score)

    p_ordc = sub.add_parser(
        "build-ordc", help="build a reserve demand curve from forecast errors"
    )
    p_ordc.add_argument("errors", help="one-column error table (header names the horizon)")
    p_ordc.add_argument("--cap", type=float, default=15000.0, help="scarcity price cap")
    p_ordc.add_argument("--steps", type=int, default=10, help="number of quantile breakpoints")
    p_ordc.add_argument("-o", "--out", help="write the breakpoint table here (default stdout)")
    p_ordc.set_defaults(handler=_cmd_ordc)

    p_nomo = sub.add_parser("nomogram", help="query a transfer-limit table")
    p_nomo.add_argument("table", help="commitment table file (bundled name or path)")
    p_nomo.add_argument("--nonsync", type=float, required=True, help="non-synchronous MW")
    p_nomo.set_defaults(handler=_cmd_nomogram)

    return parser


def _resolve(name: str) -> Path:
    """A path argument may name a bundled fixture instead of a file."""
    p = Path(name)
    if p.exists():
        return p
    try:
        fx = fixture_path(name)
    except FileNotFoundError:
        return p  # let the real open() report the missing path
    return fx / "scenario.toml" if fx.is_dir() else fx


def _cmd_run(args) -> int:
    from .outputs import emit_outputs
    from .runner import run

    scenario = load_scenario(_resolve(args.scenario))
    report = run(scenario)
    files = emit_outputs(report, args.out)
    if not args.no_plots:
        from .plots import render_figures

        files += render_figures(report, args.out)
    print(f"scenario {report.scenario_name}: {len(report.records)} intervals")
    print(f"  curtailed fraction   {fmt6(report.curtailed_fraction)}")
    print(f"  interventions        {report.intervention_count}")
    print(f"  insecure intervals   {report.insecure_intervals}")
    print(f"  shed energy (MWh)    {fmt6(report.total_shed_mwh)}")
    print(f"  total cost ($)       {fmt6(report.total_cost)}")
    print(f"  wrote {len(files)} files to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    scenario = load_scenario(_resolve(args.scenario))
    n_offers = _offer_count(scenario)
    print(
        f"OK: {scenario.name}: {len(scenario.registry.facilities)} facilities, "
        f"{n_offers} offers, {scenario.n_intervals} x {scenario.interval_minutes}-min intervals"
    )
    return 0


def _offer_count(scenario) -> int:
    from .model import ServiceKind

    seen = set()
    for i in range(max(scenario.n_intervals, 1)):
        for svc in ServiceKind:
            for offer in scenario.registry.offers_for(i, svc):
                seen.add(id(offer))
    return len(seen)


def _cmd_score(args) -> int:
    header, time_s, output_mw = read_two_columns(_resolve(args.trace))
    trace = ResponseTrace(time_s=tuple(time_s), output_mw=tuple(output_mw))
    fit = fit_exponential(trace)
    multiplier = speed_multiplier(fit, tau_reference=args.tau_ref, m_max=args.m_max)
    print(f"r_max_mw    {fmt6(fit.r_max)}")
    print(f"tau_s       {fmt6(fit.tau_s)}")
    print(f"rmse_mw     {fmt6(fit.rmse_mw)}")
    print(f"saturated   {int(fit.saturated)}")
    print(f"multiplier  {fmt6(multiplier)}")
    print(f"credited_mw {fmt6(fit.r_max * multiplier)}")
    return 0


def _cmd_ordc(args) -> int:
    horizon, samples = read_error_samples(_resolve(args.errors))
    sample_set = ErrorSampleSet(samples=tuple(samples), horizon_min=horizon)
    curve = build_demand_curve(sample_set, args.cap, args.steps)
    rows = [(0.0, curve.price_at_zero)] + list(curve.breakpoints)
    if args.out:
        write_table(args.out, ["reserve_mw", "price"], rows)
        print(f"wrote {len(rows)} breakpoints ({horizon}-min horizon) to {args.out}")
    else:
        print("reserve_mw,price")
        for r, p in rows:
            print(f"{fmt6(r)},{fmt6(p)}")
    return 0


def _cmd_nomogram(args) -> int:
    table = load_nomogram(_resolve(args.table))
    for label in feasible_combinations(table, args.nonsync):
        print(label)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
