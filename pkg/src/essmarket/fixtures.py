"""Access to the data files bundled with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

#: Names of the bundled example inputs.
BUNDLED = (
    "nem-small",
    "wem-small",
    "transfer-limits-sa.csv",
    "synthetic-errors-30m.csv",
)


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture (directory or file)."""
    root = resources.files("essmarket") / "fixtures"
    candidate = Path(str(root / name))
    if not candidate.exists():
        known = ", ".join(BUNDLED)
        raise FileNotFoundError(f"no bundled fixture {name!r} (have: {known})")
    return candidate
