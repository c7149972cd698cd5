"""Reading and writing the plain delimited tables used for all file I/O.

Every table is a comma-separated file with a single header line. Numeric
cells are written at 6 significant digits so identical runs emit identical
bytes.
"""

from __future__ import annotations

import csv
import re
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError


def fmt6(value: float) -> str:
    """Canonical 6-significant-digit rendering of a number."""
    return format(float(value), ".6g")


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write rows, formatting numeric cells at 6 significant digits."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow(
                [fmt6(c) if isinstance(c, (int, float)) and not isinstance(c, bool) else str(c)
                 for c in row]
            )
    return path


def read_table(path: str | Path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, "empty file") from None
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    return header, rows


def read_single_column(path: str | Path) -> tuple[str, list[float]]:
    """One named numeric column, e.g. a demand or availability trace."""
    header, rows = read_table(path)
    if len(header) != 1:
        raise ParseError(path, f"expected one column, found {len(header)}", line=1)
    values = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 1:
            raise ParseError(path, f"expected one field, found {len(row)}", line=lineno)
        try:
            values.append(float(row[0]))
        except ValueError:
            raise ParseError(path, f"bad number {row[0]!r}", line=lineno) from None
    return header[0].strip(), values


def read_two_columns(path: str | Path) -> tuple[list[str], list[float], list[float]]:
    """Two named numeric columns, e.g. a time/output response trace."""
    header, rows = read_table(path)
    if len(header) != 2:
        raise ParseError(path, f"expected two columns, found {len(header)}", line=1)
    a: list[float] = []
    b: list[float] = []
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 2:
            raise ParseError(path, f"expected two fields, found {len(row)}", line=lineno)
        try:
            a.append(float(row[0]))
            b.append(float(row[1]))
        except ValueError:
            raise ParseError(path, f"bad number in {row!r}", line=lineno) from None
    return [h.strip() for h in header], a, b


_HORIZON_RE = re.compile(r"_(\d+)min$")


def read_error_samples(path: str | Path) -> tuple[int, list[float]]:
    """Forecast-error table whose column name carries the horizon.

    The single column must be named like ``error_mw_30min`` or
    ``error_mw_5min``; the trailing ``_<minutes>min`` token is the horizon.
    """
    name, values = read_single_column(path)
    match = _HORIZON_RE.search(name)
    if not match:
        raise ParseError(
            path, f"column {name!r} must end in _<minutes>min to state the horizon", line=1
        )
    return int(match.group(1)), values
