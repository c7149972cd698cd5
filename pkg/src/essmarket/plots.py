"""Render the report's figures next to the delimited output tables.

Figures are drawn with a fixed size, dpi and no volatile metadata so the
PNG bytes are reproducible run to run.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .model import ServiceKind  # noqa: E402
from .runner_types import RunReport  # noqa: E402

_SAVE = dict(dpi=110, metadata={"Software": None})


def render_figures(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Write the run's figures into ``out_dir`` and return the files."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    if report.records:
        written.append(_price_duration(report, out_dir / "fig_price_duration.png"))
        written.append(_frequency(report, out_dir / "fig_frequency.png"))
        written.append(_curtailment(report, out_dir / "fig_curtailment.png"))
    if report.curves:
        written.append(_curves(report, out_dir / "fig_reserve_curves.png"))
    return sorted(written)


def _price_duration(report: RunReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    n = len(report.records)
    for svc, prices in report.price_duration.items():
        if not any(p != 0.0 for p in prices):
            continue
        share = [(k + 1) / n for k in range(n)]
        ax.step(share, prices, where="post", label=svc.value)
    ax.set_xlabel("share of intervals at or above")
    ax.set_ylabel("clearing price ($/MW/h; energy $/MWh)")
    ax.set_title(f"{report.scenario_name}: price duration")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def _frequency(report: RunReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for rec in report.records:
        ax.plot(rec.trace.time_s, rec.trace.frequency_hz, lw=0.8, alpha=0.7)
    limits = report.limits
    ax.axhline(limits.min_nadir, color="crimson", ls="--", lw=1.0, label="nadir limit")
    lo, hi = limits.settling_band
    ax.axhspan(lo, hi, color="green", alpha=0.08, label="settling band")
    ax.set_xlabel("seconds after contingency")
    ax.set_ylabel("frequency (Hz)")
    ax.set_title(f"{report.scenario_name}: post-contingency frequency")
    ax.legend(fontsize=8, loc="lower right")
    ax.grid(alpha=0.3)
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def _curtailment(report: RunReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    idx = [rec.interval for rec in report.records]
    avail = [rec.vre_available_mw for rec in report.records]
    used = [rec.vre_available_mw - rec.dispatch.curtailed_vre_mw for rec in report.records]
    demand = [rec.demand_mw for rec in report.records]
    ax.bar(idx, avail, color="lightsteelblue", label="renewable available")
    ax.bar(idx, used, color="seagreen", label="renewable dispatched")
    ax.plot(idx, demand, "k.-", lw=1.0, label="demand")
    for rec in report.records:
        if rec.decision.directed:
            ax.plot(rec.interval, rec.vre_available_mw, "rv", ms=8)
    ax.set_xlabel("interval")
    ax.set_ylabel("MW")
    ax.set_title(
        f"{report.scenario_name}: curtailment "
        f"({100.0 * report.curtailed_fraction:.1f}% of available; "
        f"red marks directed intervals)"
    )
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3, axis="y")
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path


def _curves(report: RunReport, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for svc, curve in sorted(report.curves.items(), key=lambda kv: kv[0].value):
        rs = [0.0] + [r for r, _ in curve.breakpoints]
        ps = [curve.price_at_zero] + [p for _, p in curve.breakpoints]
        ax.step(rs, ps, where="post", label=svc.value)
    ax.set_xlabel("reserve held (MW)")
    ax.set_ylabel("marginal value ($/MW)")
    ax.set_title(f"{report.scenario_name}: reserve demand curves")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.savefig(path, **_SAVE)
    plt.close(fig)
    return path
