"""Random output tables: the per-group, per-attribute replacement distributions.

A random output table (rot) for a group of m records and n candidate values
is an m x n row-stochastic matrix; entry (i, j) is the probability that
record i publishes candidate j. The delta-probability principle bounds, per
column, the largest entry divided by the column sum. The matrix minimizing
expected replacement distance under that bound is the solution of a linear
program: the max-ratio condition max_i p_ij <= delta * sum_i p_ij linearizes
to one inequality per entry, (1 - delta) p_ij - delta * sum_{i' != i}
p_{i'j} <= 0, vacuous on all-zero columns.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import LpError, MutualCoverError
from .schema import AttributeSchema, Value, distance
from .table import MODE_SPAN, candidate_values
from .lp import LinearProgram, LpSolution, solve_lp, STATUS_OPTIMAL

RATIO_TOL = 1e-9
_CLAMP_FLOOR = -1e-9
_RENORM_REL_LIMIT = 1e-8


@dataclass(frozen=True, eq=False)
class RandomOutputTable:
    """Immutable rot for one group and one attribute."""

    attribute: str
    candidates: tuple[Value, ...]
    probabilities: np.ndarray
    delta: float
    row_indices: tuple[int, ...] | None = None
    objective_value: float = 0.0

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        probs.setflags(write=False)
        object.__setattr__(self, "probabilities", probs)
        m, n = probs.shape
        if n != len(self.candidates):
            raise MutualCoverError("probability matrix width does not match candidate count")
        if probs.min(initial=0.0) < _CLAMP_FLOOR:
            raise MutualCoverError("negative probability beyond tolerance")
        if np.abs(probs.sum(axis=1) - 1.0).max() > RATIO_TOL:
            raise MutualCoverError("a row does not sum to 1 within tolerance")

    @property
    def num_records(self) -> int:
        return self.probabilities.shape[0]

    @property
    def num_candidates(self) -> int:
        return self.probabilities.shape[1]


def min_support_required(delta: float) -> int:
    """ceil(1/delta), computed robustly against float round-off."""
    return max(1, math.ceil(1.0 / delta - 1e-9))


def _distance_matrix(values: Sequence[Value], cands: Sequence[Value], attr: AttributeSchema) -> np.ndarray:
    if attr.is_continuous:
        v = np.asarray(values, dtype=np.float64)
        c = np.asarray(cands, dtype=np.float64)
        return np.abs(v[:, None] - c[None, :])
    if attr.distance_matrix is not None:
        mat = np.asarray(attr.distance_matrix, dtype=np.float64)
        vi = np.array([attr.labels.index(v) for v in values])
        ci = np.array([attr.labels.index(c) for c in cands])
        return mat[np.ix_(vi, ci)]
    v = np.asarray(values, dtype=object)
    c = np.asarray(cands, dtype=object)
    return (v[:, None] != c[None, :]).astype(np.float64)


def _check_delta_range(delta: float, m: int) -> None:
    if not (1.0 / m - 1e-12 <= delta <= 1.0 + 1e-12):
        raise MutualCoverError(
            f"delta={delta} outside the admissible range [1/{m}, 1] for a group of {m} records"
        )


def build_rot_lp(
    values: Sequence[Value],
    attr: AttributeSchema,
    candidates: Sequence[Value],
    delta: float,
) -> LinearProgram:
    """Linear program whose optimum is the minimum-cost delta-compliant rot.

    Variables are the m*n entries in row-major order. The objective weights
    entry (i, j) by the distance between record i's original value and
    candidate j, so mass stays near the originals.
    """
    m = len(values)
    n = len(candidates)
    if m == 0 or n == 0:
        raise MutualCoverError("rot needs at least one record and one candidate")
    _check_delta_range(delta, m)
    cost = _distance_matrix(values, candidates, attr).reshape(-1)
    a_eq = np.kron(np.eye(m), np.ones((1, n)))
    b_eq = np.ones(m)
    a_ub = np.eye(m * n) - delta * np.kron(np.ones((m, m)), np.eye(n))
    b_ub = np.zeros(m * n)
    return LinearProgram(objective=cost, a_eq=a_eq, b_eq=b_eq, a_ub=a_ub, b_ub=b_ub)


def compute_rot(
    values: Sequence[Value],
    attr: AttributeSchema,
    delta: float,
    candidates: Sequence[Value] | None = None,
    candidate_mode: str = MODE_SPAN,
    row_indices: Sequence[int] | None = None,
) -> RandomOutputTable:
    """Solve the rot LP for one group/attribute and finalize the matrix.

    Tiny negative solver values are clamped to zero and each row is
    renormalized to sum to exactly 1 (relative adjustment bounded at 1e-8).
    The result always satisfies the delta-probability ratio bound and the
    minimum-column-support bound; feasibility is guaranteed for
    delta >= 1/m because the uniform matrix satisfies every constraint.
    """
    if candidates is None:
        candidates = candidate_values(values, attr, candidate_mode)
    lp = build_rot_lp(values, attr, candidates, delta)
    solution: LpSolution = solve_lp(lp)
    if solution.status != STATUS_OPTIMAL:
        raise LpError(
            f"rot LP reported {solution.status} although delta >= 1/m guarantees feasibility"
        )
    m = len(values)
    n = len(candidates)
    probs = solution.x.reshape(m, n).copy()
    if probs.min(initial=0.0) < _CLAMP_FLOOR:
        raise LpError("rot LP solution has a negative entry beyond tolerance")
    # Entries within the clamp tolerance of zero are degenerate basic
    # variables; snap them to exactly 0 so column usage and support counts
    # are well-defined, then renormalize the rows.
    probs[np.abs(probs) <= -_CLAMP_FLOOR] = 0.0
    row_sums = probs.sum(axis=1)
    if np.abs(row_sums - 1.0).max() > _RENORM_REL_LIMIT:
        raise LpError("rot LP row sums drifted beyond the renormalization limit")
    probs /= row_sums[:, None]

    rot = RandomOutputTable(
        attribute=attr.name,
        candidates=tuple(candidates),
        probabilities=probs,
        delta=delta,
        row_indices=tuple(row_indices) if row_indices is not None else None,
        objective_value=float(solution.objective_value),
    )
    if not verify_delta_probability(rot):
        raise LpError("finalized rot violates the delta-probability bound")
    if min_column_support(rot) < min_support_required(delta):
        raise LpError("finalized rot violates the minimum column support bound")
    return rot


def verify_delta_probability(rot: RandomOutputTable) -> bool:
    """True iff every non-zero column has max entry / column sum <= delta."""
    probs = rot.probabilities
    col_sums = probs.sum(axis=0)
    col_max = probs.max(axis=0)
    used = col_sums > 0.0
    if not used.any():
        return True
    return bool(np.all(col_max[used] <= rot.delta * col_sums[used] + RATIO_TOL))


def min_column_support(rot: RandomOutputTable) -> int:
    """Minimum count of strictly positive entries over non-zero columns."""
    probs = rot.probabilities
    used = probs.max(axis=0) > 0.0
    if not used.any():
        raise MutualCoverError("rot has no non-zero column")
    support = (probs[:, used] > 0.0).sum(axis=0)
    return int(support.min())


def rot_to_csv(rot: RandomOutputTable) -> str:
    """Debug CSV: one line per record, one column per candidate value.

    Never part of published output; intended for offline inspection only.
    """
    buf = io.StringIO()
    buf.write("record," + ",".join(str(c) for c in rot.candidates) + "\n")
    labels = rot.row_indices if rot.row_indices is not None else range(rot.num_records)
    for label, row in zip(labels, rot.probabilities):
        buf.write(str(label) + "," + ",".join(f"{p:.12g}" for p in row) + "\n")
    return buf.getvalue()
