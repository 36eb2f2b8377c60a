"""Disjoint l-diverse QI groups via recursive median splits.

The splitter is a multidimensional Mondrian variant: at each node it tries
attributes in order of widest normalized range and accepts the first median
split whose halves are both non-empty and diverse. A node where no attribute
yields an acceptable split becomes one QI group. The recursion is fully
deterministic.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InfeasiblePartitionError
from .schema import AttributeSchema, Schema, Value
from .table import Table, max_distance

DiversityPredicate = Callable[[Sequence[Value]], bool]


@dataclass(frozen=True)
class QIGroup:
    """Row indices of one group; non-empty, unique, sorted."""

    row_indices: tuple[int, ...]

    def __post_init__(self):
        if not self.row_indices:
            raise ValueError("QI group must be non-empty")
        if len(set(self.row_indices)) != len(self.row_indices):
            raise ValueError("QI group indices must be unique")

    def __len__(self) -> int:
        return len(self.row_indices)


@dataclass(frozen=True)
class Partition:
    groups: tuple[QIGroup, ...]
    row_count: int

    def __post_init__(self):
        seen = set()
        for group in self.groups:
            for idx in group.row_indices:
                if idx in seen:
                    raise ValueError(f"row {idx} appears in more than one group")
                seen.add(idx)
        if seen != set(range(self.row_count)):
            raise ValueError("groups do not cover the table exactly")

    def group_of_row(self) -> np.ndarray:
        """Array mapping row index to group index."""
        owner = np.empty(self.row_count, dtype=np.int64)
        for g, group in enumerate(self.groups):
            owner[list(group.row_indices)] = g
        return owner


def is_l_diverse(sensitive_values: Sequence[Value], l: int) -> bool:
    """True iff non-empty and every sensitive value's proportion is <= 1/l.

    Uses integer arithmetic (count * l <= n), so boundary cases are exact.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    n = len(sensitive_values)
    if n == 0:
        return False
    most_common = Counter(sensitive_values).most_common(1)[0][1]
    return most_common * l <= n


def median_value(values: Sequence[Value], attr: AttributeSchema) -> Value:
    """Lower median under the attribute's canonical order."""
    if not values:
        raise ValueError("median of empty value list")
    ordered = sorted(values, key=attr.sort_key)
    return ordered[(len(ordered) - 1) // 2]


def _group_range(keys: np.ndarray, attr: AttributeSchema) -> float:
    """Max pairwise distance over a key slice (keys are canonical codes)."""
    if keys.size == 0:
        return 0.0
    lo = int(keys.min())
    hi = int(keys.max())
    if lo == hi:
        return 0.0
    if attr.is_continuous:
        return float(hi - lo)
    if attr.distance_matrix is None:
        return 1.0
    present = np.unique(keys)
    mat = np.asarray(attr.distance_matrix)
    return float(mat[np.ix_(present, present)].max())


def choose_attribute(
    table: Table,
    indices: np.ndarray,
    candidates: Sequence[AttributeSchema],
    table_ranges: dict[str, float] | None = None,
) -> AttributeSchema:
    """Candidate with the widest normalized range over the given rows.

    Normalization divides the in-group range by the whole-table range
    (0/0 counts as 0). Ties go to the earlier attribute in schema order.
    """
    if not candidates:
        raise ValueError("no candidate attributes")
    if table_ranges is None:
        table_ranges = whole_table_ranges(table)
    best = None
    best_score = -1.0
    for attr in table.schema.qi_attributes:
        if attr not in candidates:
            continue
        denom = table_ranges[attr.name]
        if denom == 0.0:
            score = 0.0
        else:
            keys = table.qi_key_arrays[table.schema.qi_index(attr.name)][indices]
            score = _group_range(keys, attr) / denom
        if score > best_score:
            best = attr
            best_score = score
    return best


def whole_table_ranges(table: Table) -> dict[str, float]:
    return {
        attr.name: max_distance(table.qi_values(j), attr)
        for j, attr in enumerate(table.schema.qi_attributes)
    }


def partition_table(
    table: Table,
    l: int,
    principle: DiversityPredicate | None = None,
) -> Partition:
    """Split the table into disjoint diverse QI groups.

    The diversity principle defaults to l-diversity over the sensitive
    column; a different predicate (taking the group's sensitive values)
    may be plugged in. The whole table must satisfy the principle, else
    splitting could silently emit a non-diverse leaf.
    """
    if l < 1:
        raise ValueError("l must be a positive integer")
    schema: Schema = table.schema
    sens_codes = table.sensitive_codes

    if principle is None:
        def diverse(indices: np.ndarray) -> bool:
            if indices.size == 0:
                return False
            counts = np.bincount(sens_codes[indices])
            return int(counts.max()) * l <= indices.size
    else:
        def diverse(indices: np.ndarray) -> bool:
            if indices.size == 0:
                return False
            return bool(principle(table.sensitive_values(indices.tolist())))

    all_indices = np.arange(len(table), dtype=np.int64)
    if not diverse(all_indices):
        raise InfeasiblePartitionError(
            f"table does not satisfy the diversity principle at l={l}; no partition exists"
        )

    table_ranges = whole_table_ranges(table)
    key_arrays = table.qi_key_arrays
    groups: list[QIGroup] = []

    def recurse(indices: np.ndarray) -> None:
        candidates = list(schema.qi_attributes)
        while candidates:
            attr = choose_attribute(table, indices, candidates, table_ranges)
            j = schema.qi_index(attr.name)
            keys = key_arrays[j][indices]
            median_key = int(np.sort(keys)[(keys.size - 1) // 2])
            small = indices[keys <= median_key]
            big = indices[keys > median_key]
            if small.size and big.size and diverse(small) and diverse(big):
                recurse(small)
                recurse(big)
                return
            candidates.remove(attr)
        groups.append(QIGroup(row_indices=tuple(int(i) for i in indices)))

    recurse(all_indices)
    return Partition(groups=tuple(groups), row_count=len(table))
