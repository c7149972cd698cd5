"""Security-driven unit commitment from precomputed transfer-limit tables.

A table row says: with this combination of synchronous units online, the
system can host at most this much non-synchronous generation. The tables
come from offline network studies and are consumed here as data; selection
adds the economics, picking the cheapest combination that supports the
forecast renewable level and the required stored energy. When nothing
qualifies, the operator directs the closest combination on and renewables
are curtailed to its limit.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyTable, InvariantViolation, ParseError
from .model import Registry, total_system_inertia


@dataclass(frozen=True)
class Combination:
    label: str
    nonsync_limit_mw: float
    required_units: frozenset[str]

    def __post_init__(self) -> None:
        if not self.label:
            raise InvariantViolation("combination label must be non-empty")
        if self.nonsync_limit_mw <= 0.0:
            raise InvariantViolation(f"{self.label}: nonsync_limit_mw must be > 0")
        if not self.required_units:
            raise InvariantViolation(f"{self.label}: required_units must be non-empty")


@dataclass(frozen=True)
class NomogramTable:
    combinations: tuple[Combination, ...]

    def __post_init__(self) -> None:
        labels = [c.label for c in self.combinations]
        if len(set(labels)) != len(labels):
            raise InvariantViolation("combination labels must be unique")

    def find(self, label: str) -> Combination:
        for combo in self.combinations:
            if combo.label == label:
                return combo
        raise KeyError(label)


@dataclass(frozen=True)
class CommitmentDecision:
    """Outcome of commitment selection for one interval.

    ``directed`` marks an out-of-market operator direction: no combination
    supported the requested level, so the best available one is forced on
    and the caller must curtail non-synchronous output to ``limit_mw``.
    """

    chosen_label: str | None
    committed: frozenset[str]
    commitment_cost: float
    directed: bool
    limit_mw: float | None = None


def feasible_combinations(table: NomogramTable, nonsync_mw: float) -> list[str]:
    """Labels of combinations whose limit covers ``nonsync_mw``, table order."""
    if nonsync_mw < 0.0:
        raise InvariantViolation("nonsync_mw must be >= 0")
    return [c.label for c in table.combinations if c.nonsync_limit_mw >= nonsync_mw]


def select_commitment(
    table: NomogramTable,
    registry: Registry,
    nonsync_mw: float,
    inertia_floor_mws: float = 0.0,
) -> CommitmentDecision:
    """Cheapest combination hosting ``nonsync_mw`` with enough stored energy.

    Ties break toward fewer units, then label. With no fully feasible
    combination the decision is directed: prefer combinations meeting the
    inertia floor at the highest hosting limit; failing even that, the
    highest-inertia combination. Directed decisions ignore cost.
    """
    if not table.combinations:
        raise EmptyTable("commitment table has no combinations")

    def cost_of(combo: Combination) -> float:
        return sum(registry.facility(u).commitment_cost for u in combo.required_units)

    def inertia_of(combo: Combination) -> float:
        return total_system_inertia(registry, combo.required_units)

    feasible = [
        c
        for c in table.combinations
        if c.nonsync_limit_mw >= nonsync_mw and inertia_of(c) >= inertia_floor_mws
    ]
    if feasible:
        best = min(feasible, key=lambda c: (cost_of(c), len(c.required_units), c.label))
        return CommitmentDecision(
            chosen_label=best.label,
            committed=best.required_units,
            commitment_cost=cost_of(best),
            directed=False,
            limit_mw=best.nonsync_limit_mw,
        )

    meets_floor = [c for c in table.combinations if inertia_of(c) >= inertia_floor_mws]
    if meets_floor:
        best = min(
            meets_floor,
            key=lambda c: (-c.nonsync_limit_mw, cost_of(c), len(c.required_units), c.label),
        )
    else:
        best = min(
            table.combinations,
            key=lambda c: (-inertia_of(c), -c.nonsync_limit_mw, cost_of(c), c.label),
        )
    return CommitmentDecision(
        chosen_label=best.label,
        committed=best.required_units,
        commitment_cost=cost_of(best),
        directed=True,
        limit_mw=best.nonsync_limit_mw,
    )


def intervention_count(decisions: list[CommitmentDecision]) -> int:
    """Number of intervals settled by operator direction."""
    return sum(1 for d in decisions if d.directed)


_HEADER = ["label", "nonsync_limit_mw", "units"]


def load_nomogram(path: str | Path) -> NomogramTable:
    """Read a commitment table: label, limit, space-separated unit ids."""
    path = Path(path)
    combos: list[Combination] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, "empty file") from None
        if header != _HEADER:
            raise ParseError(path, f"expected header {','.join(_HEADER)}", line=1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(path, f"expected 3 fields, got {len(row)}", line=lineno)
            label, limit_s, units_s = (cell.strip() for cell in row)
            try:
                limit = float(limit_s)
            except ValueError:
                raise ParseError(path, f"bad limit {limit_s!r}", line=lineno) from None
            units = frozenset(units_s.split())
            try:
                combos.append(Combination(label, limit, units))
            except InvariantViolation as exc:
                raise ParseError(path, str(exc), line=lineno) from None
    return NomogramTable(tuple(combos))


def save_nomogram(table: NomogramTable, path: str | Path) -> None:
    """Write a table in the canonical load format (round-trips exactly)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_HEADER)
        for combo in table.combinations:
            writer.writerow(
                [
                    combo.label,
                    format(combo.nonsync_limit_mw, ".6g"),
                    " ".join(sorted(combo.required_units)),
                ]
            )
