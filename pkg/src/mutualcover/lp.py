"""Deterministic dense LP solver for the random-output-table problems.

Standard form: minimize c.x subject to A_eq x = b_eq, A_ub x <= b_ub,
x >= 0. The solver is a two-phase primal simplex on the full tableau.
Pivot selection uses the most negative reduced cost with lowest-index tie
breaks; after a run of degenerate pivots it switches to Bland's rule, which
guarantees termination. Everything is tie-broken by index, so identical
inputs yield bitwise-identical solutions.

The problems this package generates are small (at most a few thousand
variables) but heavily degenerate: the delta constraints have zero right
hand sides and whole variable columns can be forced to zero. The final
basic solution is therefore recomputed from the original constraint data
(one dense solve against the final basis) before the feasibility checks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LpError

FEASIBILITY_TOL = 1e-9
OPTIMALITY_TOL = 1e-8

_PIVOT_TOL = 1e-10
_REDUCED_COST_TOL = 1e-9
_STALL_LIMIT = 64
_MAX_ITERATIONS = 500_000
_REFRESH_EVERY = 512

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


def _as_matrix(a, n_cols: int, what: str) -> np.ndarray:
    if a is None:
        return np.zeros((0, n_cols), dtype=np.float64)
    mat = np.asarray(a, dtype=np.float64)
    if mat.ndim != 2:
        raise LpError(f"{what} must be a 2-D matrix")
    if mat.shape[1] != n_cols:
        raise LpError(f"{what} has {mat.shape[1]} columns, expected {n_cols}")
    return mat


def _as_vector(v, length: int, what: str) -> np.ndarray:
    if v is None:
        return np.zeros(0, dtype=np.float64)
    vec = np.asarray(v, dtype=np.float64).reshape(-1)
    if vec.shape[0] != length:
        raise LpError(f"{what} has length {vec.shape[0]}, expected {length}")
    return vec


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """min objective.x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  x >= 0."""

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray

    def __init__(self, objective, a_eq=None, b_eq=None, a_ub=None, b_ub=None):
        c = np.asarray(objective, dtype=np.float64).reshape(-1)
        if c.size == 0:
            raise LpError("objective must have at least one variable")
        a_eq = _as_matrix(a_eq, c.size, "a_eq")
        a_ub = _as_matrix(a_ub, c.size, "a_ub")
        b_eq = _as_vector(b_eq, a_eq.shape[0], "b_eq")
        b_ub = _as_vector(b_ub, a_ub.shape[0], "b_ub")
        for name, arr in (("objective", c), ("a_eq", a_eq), ("b_eq", b_eq),
                          ("a_ub", a_ub), ("b_ub", b_ub)):
            if arr.size and not np.all(np.isfinite(arr)):
                raise LpError(f"{name} contains a non-finite coefficient")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "a_eq", a_eq)
        object.__setattr__(self, "b_eq", b_eq)
        object.__setattr__(self, "a_ub", a_ub)
        object.__setattr__(self, "b_ub", b_ub)

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.b_eq.size + self.b_ub.size


@dataclass(frozen=True)
class LpSolution:
    status: str
    x: np.ndarray | None = None
    objective_value: float | None = None


def dump_lp(lp: LinearProgram) -> str:
    """Plain-text form for offline cross-checking: objective row first,
    then one line per constraint."""
    lines = ["min " + " ".join(f"{v:.17g}" for v in lp.objective)]
    for row, rhs in zip(lp.a_eq, lp.b_eq):
        lines.append(" ".join(f"{v:.17g}" for v in row) + f" = {rhs:.17g}")
    for row, rhs in zip(lp.a_ub, lp.b_ub):
        lines.append(" ".join(f"{v:.17g}" for v in row) + f" <= {rhs:.17g}")
    return "\n".join(lines) + "\n"


class _Tableau:
    """Mutable simplex state over the slack-extended system."""

    def __init__(self, lp: LinearProgram):
        n = lp.num_vars
        n_eq = lp.b_eq.size
        n_ub = lp.b_ub.size
        m = n_eq + n_ub
        body = np.zeros((m, n + n_ub), dtype=np.float64)
        if n_eq:
            body[:n_eq, :n] = lp.a_eq
        if n_ub:
            body[n_eq:, :n] = lp.a_ub
            body[n_eq:, n:] = np.eye(n_ub)
        rhs = np.concatenate([lp.b_eq, lp.b_ub])
        flip = rhs < 0
        body[flip] *= -1.0
        rhs = np.abs(rhs)

        self.n_structural = n
        self.n_real = n + n_ub          # structural + slack columns
        self.body = body
        self.rhs = rhs
        self.row_kept = np.arange(m)

        # Rows whose slack survived the sign flip start with the slack basic;
        # every other row gets an artificial variable.
        self.basis = np.full(m, -1, dtype=np.int64)
        art_rows = []
        for r in range(m):
            if r >= n_eq and not flip[r]:
                self.basis[r] = n + (r - n_eq)
            else:
                art_rows.append(r)
        n_art = len(art_rows)
        if n_art:
            art_block = np.zeros((m, n_art), dtype=np.float64)
            for k, r in enumerate(art_rows):
                art_block[r, k] = 1.0
                self.basis[r] = self.n_real + k
            self.body = np.hstack([self.body, art_block])
        self.n_total = self.body.shape[1]

    def reduced_costs(self, cost: np.ndarray) -> tuple[np.ndarray, float]:
        c_b = cost[self.basis]
        reduced = cost - c_b @ self.body
        value = float(c_b @ self.rhs)
        return reduced, value

    def pivot(self, row: int, col: int) -> None:
        body = self.body
        piv = body[row, col]
        body[row] /= piv
        self.rhs[row] /= piv
        factors = body[:, col].copy()
        factors[row] = 0.0
        body -= np.outer(factors, body[row])
        body[:, col] = 0.0
        body[row, col] = 1.0
        self.rhs -= factors * self.rhs[row]
        np.maximum(self.rhs, 0.0, out=self.rhs)
        self.basis[row] = col

    def drop_rows(self, keep_mask: np.ndarray) -> None:
        self.body = self.body[keep_mask]
        self.rhs = self.rhs[keep_mask]
        self.basis = self.basis[keep_mask]
        self.row_kept = self.row_kept[keep_mask]


def _run_phase(tab: _Tableau, cost: np.ndarray, allowed: np.ndarray) -> str:
    """Minimize cost over the tableau; returns 'optimal' or 'unbounded'.

    `allowed` masks columns eligible to enter the basis. Determinism: the
    entering column is the most negative reduced cost (first on ties) until
    a degenerate stall, then Bland's lowest-index rule.
    """
    reduced, _ = tab.reduced_costs(cost)
    bland = False
    stall = 0
    for iteration in range(_MAX_ITERATIONS):
        if iteration and iteration % _REFRESH_EVERY == 0:
            reduced, _ = tab.reduced_costs(cost)

        candidates = np.flatnonzero(allowed & (reduced < -_REDUCED_COST_TOL))
        if candidates.size == 0:
            return STATUS_OPTIMAL
        if bland:
            enter = int(candidates[0])
        else:
            enter = int(candidates[np.argmin(reduced[candidates])])

        col = tab.body[:, enter]
        pos = np.flatnonzero(col > _PIVOT_TOL)
        if pos.size == 0:
            return STATUS_UNBOUNDED
        ratios = tab.rhs[pos] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + _PIVOT_TOL]
        # Lowest basic-variable index among the tied rows (Bland's exit rule,
        # applied in both modes for determinism).
        leave = int(ties[np.argmin(tab.basis[ties])])

        if best <= _PIVOT_TOL:
            stall += 1
            if stall >= _STALL_LIMIT:
                bland = True
        else:
            stall = 0
            bland = False

        tab.pivot(leave, enter)
        reduced = reduced - reduced[enter] * tab.body[leave]
        reduced[enter] = 0.0
    raise LpError("simplex iteration limit exceeded")


def _drive_out_artificials(tab: _Tableau) -> None:
    """After phase 1, remove artificial variables from the basis.

    A basic artificial sits at value ~0. If its row has a nonzero entry in
    some real column we pivot there (a degenerate pivot); otherwise the row
    is redundant and is dropped.
    """
    keep = np.ones(tab.body.shape[0], dtype=bool)
    for r in range(tab.body.shape[0]):
        if tab.basis[r] < tab.n_real:
            continue
        row = tab.body[r, :tab.n_real]
        best = int(np.argmax(np.abs(row)))
        if abs(row[best]) > _PIVOT_TOL:
            tab.pivot(r, best)
        else:
            keep[r] = False
    if not keep.all():
        tab.drop_rows(keep)


def _refine_solution(lp: LinearProgram, tab: _Tableau) -> np.ndarray:
    """Re-solve the final basis against the original data to shed the
    round-off accumulated by tableau pivoting."""
    n = lp.num_vars
    n_eq = lp.b_eq.size
    rows = tab.row_kept
    full = np.zeros((rows.size, tab.n_real), dtype=np.float64)
    rhs = np.empty(rows.size, dtype=np.float64)
    for out, r in enumerate(rows):
        if r < n_eq:
            full[out, :n] = lp.a_eq[r]
            rhs[out] = lp.b_eq[r]
        else:
            full[out, :n] = lp.a_ub[r - n_eq]
            full[out, n + (r - n_eq)] = 1.0
            rhs[out] = lp.b_ub[r - n_eq]
    basis_cols = full[:, tab.basis]
    try:
        x_basic = np.linalg.solve(basis_cols, rhs)
    except np.linalg.LinAlgError:
        x_basic = tab.rhs
    x = np.zeros(tab.n_real, dtype=np.float64)
    x[tab.basis] = x_basic
    return x[:n]


def _check_feasible(lp: LinearProgram, x: np.ndarray) -> None:
    if x.min(initial=0.0) < -FEASIBILITY_TOL:
        raise LpError("solver returned a negative component beyond tolerance")
    if lp.b_eq.size:
        residual = np.abs(lp.a_eq @ x - lp.b_eq).max()
        if residual > FEASIBILITY_TOL:
            raise LpError(f"equality residual {residual:.3e} beyond tolerance")
    if lp.b_ub.size:
        excess = (lp.a_ub @ x - lp.b_ub).max()
        if excess > FEASIBILITY_TOL:
            raise LpError(f"inequality excess {excess:.3e} beyond tolerance")


def solve_lp(lp: LinearProgram) -> LpSolution:
    """Solve to optimality, or report infeasible/unbounded exactly.

    Optimal solutions are feasible within FEASIBILITY_TOL and their
    objective is within OPTIMALITY_TOL of the true optimum at the problem
    sizes this package generates.
    """
    if lp.num_constraints == 0:
        # Only x >= 0 remains: the optimum is x = 0 unless some cost is negative.
        if np.any(lp.objective < -_REDUCED_COST_TOL):
            return LpSolution(status=STATUS_UNBOUNDED)
        x = np.zeros(lp.num_vars)
        return LpSolution(status=STATUS_OPTIMAL, x=x, objective_value=0.0)

    tab = _Tableau(lp)

    if tab.n_total > tab.n_real:
        phase1_cost = np.zeros(tab.n_total)
        phase1_cost[tab.n_real:] = 1.0
        allowed = np.ones(tab.n_total, dtype=bool)
        status = _run_phase(tab, phase1_cost, allowed)
        if status != STATUS_OPTIMAL:
            raise LpError("phase 1 reported unbounded; artificial cost is bounded below")
        _, value = tab.reduced_costs(phase1_cost)
        scale = max(1.0,
                    np.abs(lp.b_eq).max(initial=0.0),
                    np.abs(lp.b_ub).max(initial=0.0))
        if value > FEASIBILITY_TOL * scale:
            return LpSolution(status=STATUS_INFEASIBLE)
        _drive_out_artificials(tab)

    cost = np.zeros(tab.n_total)
    cost[: lp.num_vars] = lp.objective
    allowed = np.zeros(tab.n_total, dtype=bool)
    allowed[: tab.n_real] = True
    status = _run_phase(tab, cost, allowed)
    if status == STATUS_UNBOUNDED:
        return LpSolution(status=STATUS_UNBOUNDED)

    x = _refine_solution(lp, tab)
    _check_feasible(lp, x)
    objective = float(lp.objective @ x)
    return LpSolution(status=STATUS_OPTIMAL, x=x, objective_value=objective)
