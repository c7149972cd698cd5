"""Small dense linear-program solver with dual prices.

Two-phase primal simplex on the full tableau, Bland's rule throughout, so
repeated runs of the same program visit the same bases and report the same
duals even when the optimum is degenerate. Problem sizes here are tens of
variables, so the dense tableau with recomputed reduced costs is the
simplest thing that is obviously correct.

Minimization form: costs on variables x >= 0 (optional upper bounds),
rows a.x (<=|=|>=) b. Duals are reported as d objective / d rhs in the
row orientation given by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalFailure, UnboundedProblem

_PIVOT_TOL = 1e-9
_LE, _EQ, _GE = "<=", "==", ">="


@dataclass(frozen=True)
class LpSolution:
    x: np.ndarray
    objective: float
    duals: dict[str, float]
    activities: dict[str, float]
    slacks: dict[str, float]
    iterations: int

    def dual(self, tag: str) -> float:
        return self.duals.get(tag, 0.0)


class LinearProgram:
    """Incrementally built LP: add variables, then rows, then solve."""

    def __init__(self) -> None:
        self._costs: list[float] = []
        self._uppers: list[float | None] = []
        self._rows: list[tuple[dict[int, float], str, float, str]] = []

    @property
    def n_vars(self) -> int:
        return len(self._costs)

    def add_var(self, cost: float, upper: float | None = None) -> int:
        """New variable x >= 0 with objective coefficient ``cost``."""
        if upper is not None and upper < 0.0:
            raise ValueError("variable upper bound must be >= 0")
        self._costs.append(float(cost))
        self._uppers.append(upper)
        return len(self._costs) - 1

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float, tag: str) -> None:
        if sense not in (_LE, _EQ, _GE):
            raise ValueError(f"unknown sense {sense!r}")
        if any(t == tag for _, _, _, t in self._rows):
            raise ValueError(f"duplicate row tag {tag!r}")
        self._rows.append((dict(coeffs), sense, float(rhs), tag))

    def solve(self) -> LpSolution:
        n = self.n_vars
        rows = list(self._rows)
        # upper bounds become plain <= rows after the caller's rows
        for j, ub in enumerate(self._uppers):
            if ub is not None:
                rows.append(({j: 1.0}, _LE, float(ub), f"_ub:{j}"))
        m = len(rows)
        if n == 0 or m == 0:
            raise NumericalFailure("empty linear program")

        a = np.zeros((m, n))
        b = np.zeros(m)
        senses: list[str] = []
        tags: list[str] = []
        for i, (coeffs, sense, rhs, tag) in enumerate(rows):
            for j, v in coeffs.items():
                a[i, j] = v
            b[i] = rhs
            senses.append(sense)
            tags.append(tag)

        x, duals_norm, iters = _two_phase_simplex(np.asarray(self._costs, float), a, b, senses)

        activities = a @ x
        duals: dict[str, float] = {}
        slacks: dict[str, float] = {}
        acts: dict[str, float] = {}
        for i, tag in enumerate(tags):
            if tag.startswith("_ub:"):
                continue
            duals[tag] = duals_norm[i]
            acts[tag] = activities[i]
            if senses[i] == _LE:
                slacks[tag] = b[i] - activities[i]
            elif senses[i] == _GE:
                slacks[tag] = activities[i] - b[i]
            else:
                slacks[tag] = activities[i] - b[i]
        objective = float(np.asarray(self._costs) @ x)
        return LpSolution(x, objective, duals, acts, slacks, iters)


def _two_phase_simplex(
    c: np.ndarray, a: np.ndarray, b: np.ndarray, senses: list[str]
) -> tuple[np.ndarray, np.ndarray, int]:
    """Solve min c.x, a x (sense) b, x >= 0; return (x, row duals, iterations)."""
    m, n = a.shape
    a = a.copy()
    b = b.copy()
    senses = list(senses)
    flipped = np.zeros(m, dtype=bool)
    for i in range(m):
        if b[i] < 0.0:
            a[i] *= -1.0
            b[i] *= -1.0
            flipped[i] = True
            if senses[i] == _LE:
                senses[i] = _GE
            elif senses[i] == _GE:
                senses[i] = _LE

    # column layout: structural | slack/surplus | artificial; every row gets
    # exactly one +e_i column (the slack for <=, the artificial otherwise),
    # which is what lets duals be read off the final tableau.
    slack_col: dict[int, int] = {}
    art_col: dict[int, int] = {}
    ncols = n
    for i in range(m):
        if senses[i] in (_LE, _GE):
            slack_col[i] = ncols
            ncols += 1
    for i in range(m):
        if senses[i] in (_GE, _EQ):
            art_col[i] = ncols
            ncols += 1

    t = np.zeros((m, ncols + 1))
    t[:, :n] = a
    t[:, -1] = b
    basis = np.empty(m, dtype=int)
    for i in range(m):
        if senses[i] == _LE:
            t[i, slack_col[i]] = 1.0
            basis[i] = slack_col[i]
        elif senses[i] == _GE:
            t[i, slack_col[i]] = -1.0
            t[i, art_col[i]] = 1.0
            basis[i] = art_col[i]
        else:
            t[i, art_col[i]] = 1.0
            basis[i] = art_col[i]

    first_art = n + len(slack_col)
    total_iters = 0

    if art_col:
        cost1 = np.zeros(ncols)
        cost1[first_art:] = 1.0
        total_iters += _run_simplex(t, basis, cost1, allowed_max=ncols)
        phase1_obj = float(cost1[basis] @ t[:, -1])
        if phase1_obj > 1e-7 * (1.0 + float(np.max(np.abs(b), initial=0.0))):
            raise NumericalFailure(f"no feasible point (phase-1 objective {phase1_obj:.3e})")
        # drive any artificial still basic at zero out of the basis
        for i in range(m):
            if basis[i] >= first_art:
                row = t[i, :first_art]
                cands = np.nonzero(np.abs(row) > _PIVOT_TOL)[0]
                if cands.size:
                    _pivot(t, basis, i, int(cands[0]))

    cost2 = np.zeros(ncols)
    cost2[:n] = c
    total_iters += _run_simplex(t, basis, cost2, allowed_max=first_art)

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = t[i, -1]

    cb = cost2[basis]
    duals = np.empty(m)
    for i in range(m):
        ident = slack_col[i] if senses[i] == _LE else art_col[i]
        duals[i] = float(cb @ t[:, ident])
    duals[flipped] *= -1.0
    return x, duals, total_iters


def _run_simplex(t: np.ndarray, basis: np.ndarray, cost: np.ndarray, allowed_max: int) -> int:
    """Bland-rule simplex iterations in place; returns the iteration count."""
    m = t.shape[0]
    rc_tol = 1e-8 * (1.0 + float(np.max(np.abs(cost), initial=0.0)))
    max_iters = 1000 + 50 * (m + allowed_max)
    for it in range(max_iters):
        rc = cost[:allowed_max] - cost[basis] @ t[:, :allowed_max]
        entering = -1
        for j in range(allowed_max):
            if rc[j] < -rc_tol:
                entering = j
                break
        if entering < 0:
            return it
        col = t[:, entering]
        best_ratio = np.inf
        leaving = -1
        for i in range(m):
            if col[i] > _PIVOT_TOL:
                ratio = t[i, -1] / col[i]
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            raise UnboundedProblem("objective unbounded below")
        _pivot(t, basis, leaving, entering)
    raise NumericalFailure(f"simplex did not converge in {max_iters} iterations")


def _pivot(t: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    for i in range(t.shape[0]):
        if i != row and abs(t[i, col]) > 0.0:
            t[i] -= t[i, col] * t[row]
    basis[row] = col
