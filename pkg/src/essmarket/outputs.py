"""Persist a run report as plain delimited tables.

One results table (a row per interval, facility and service), one
frequency-trace table per interval, one breakpoint table per reserve
demand curve, and a one-row summary. All numbers are written at 6
significant digits; rerunning the same scenario reproduces every file
byte for byte.
"""

from __future__ import annotations

from pathlib import Path

from .model import ServiceKind
from .runner_types import RunReport
from .tables import write_table

RESULTS_HEADER = [
    "interval",
    "facility",
    "tech",
    "service",
    "cleared_mw",
    "price",
    "available_mw",
    "directed",
    "combination",
    "shed_mw",
    "secure",
]

SUMMARY_HEADER = [
    "intervals",
    "curtailed_fraction",
    "intervention_count",
    "insecure_intervals",
    "total_shed_mwh",
    "total_cost_dollars",
]


def emit_outputs(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write the report's tables into ``out_dir`` and return the files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if report.records:
        written.append(
            write_table(out_dir / "results.csv", RESULTS_HEADER, _result_rows(report))
        )
        for rec in report.records:
            rows = zip(rec.trace.time_s, rec.trace.frequency_hz)
            written.append(
                write_table(
                    out_dir / f"trace_{rec.interval:04d}.csv",
                    ["time_s", "frequency_hz"],
                    rows,
                )
            )

    for svc, curve in sorted(report.curves.items(), key=lambda kv: kv[0].value):
        rows = [(0.0, curve.price_at_zero)] + list(curve.breakpoints)
        written.append(
            write_table(out_dir / f"curve_{svc.value}.csv", ["reserve_mw", "price"], rows)
        )

    summary = [
        len(report.records),
        report.curtailed_fraction,
        report.intervention_count,
        report.insecure_intervals,
        report.total_shed_mwh,
        report.total_cost,
    ]
    written.append(write_table(out_dir / "summary.csv", SUMMARY_HEADER, [summary]))
    return sorted(written)


def _result_rows(report: RunReport):
    reg = report.registry
    for rec in report.records:
        dispatch = rec.dispatch
        directed = int(rec.decision.directed)
        combination = rec.decision.chosen_label or ""
        secure = int(rec.verdict.overall)
        for svc in ServiceKind:
            by_fac = dispatch.cleared.get(svc, None)
            if by_fac is None:
                continue
            price = dispatch.prices.get(svc, 0.0)
            for fid in sorted(by_fac):
                available = (
                    reg.facility(fid).available_mw(rec.interval)
                    if svc is ServiceKind.ENERGY
                    else ""
                )
                yield (
                    rec.interval,
                    fid,
                    reg.facility(fid).tech.value,
                    svc.value,
                    by_fac[fid],
                    price,
                    available,
                    directed,
                    combination,
                    dispatch.shed_mw,
                    secure,
                )
