"""Comparison schemes: l-diverse Mondrian generalization and Anatomy.

Generalization coarsens each group's QI values to the group min-max range
(continuous) or observed label set (categorical). Anatomy publishes exact
QI values next to a bucket id and the sensitive values in a separate table,
with each bucket holding l rows of pairwise distinct sensitive values.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DataError
from .partition import DiversityPredicate, Partition, partition_table
from .schema import Schema, Value
from .table import Table

Region = Union[tuple[int, int], frozenset]


def region_contains(region: Region, value: Value) -> bool:
    if isinstance(region, frozenset):
        return value in region
    lo, hi = region
    return lo <= value <= hi


def format_region(region: Region, schema_labels: tuple[str, ...] | None = None) -> str:
    """CSV syntax: "lo-hi" for ranges, "{a|b}" for label sets."""
    if isinstance(region, frozenset):
        if schema_labels is not None:
            ordered = [lbl for lbl in schema_labels if lbl in region]
        else:
            ordered = sorted(region)
        return "{" + "|".join(ordered) + "}"
    lo, hi = region
    return f"{lo}-{hi}"


@dataclass(frozen=True, eq=False)
class GeneralizedTable:
    """Row-aligned generalized view; the partition is kept for metrics only
    and is never serialized."""

    schema: Schema
    group_regions: tuple[tuple[Region, ...], ...]   # [group][attr]
    sensitive: tuple[Value, ...]
    partition: Partition

    def __len__(self) -> int:
        return len(self.sensitive)

    def row_region(self, row_index: int, attr_index: int) -> Region:
        return self.group_regions[self.group_of_row[row_index]][attr_index]

    @property
    def group_of_row(self) -> np.ndarray:
        if not hasattr(self, "_owner"):
            object.__setattr__(self, "_owner", self.partition.group_of_row())
        return self._owner


def mondrian_generalize(
    table: Table,
    l: int,
    principle: DiversityPredicate | None = None,
) -> GeneralizedTable:
    """Generalize via the same l-diverse partition the anonymizer uses."""
    part = partition_table(table, l, principle=principle)
    regions: list[tuple[Region, ...]] = []
    for group in part.groups:
        indices = list(group.row_indices)
        attr_regions: list[Region] = []
        for j, attr in enumerate(table.schema.qi_attributes):
            values = table.qi_values(j, indices)
            if attr.is_continuous:
                attr_regions.append((min(values), max(values)))
            else:
                attr_regions.append(frozenset(values))
        regions.append(tuple(attr_regions))
    return GeneralizedTable(
        schema=table.schema,
        group_regions=tuple(regions),
        sensitive=tuple(r.sensitive for r in table.rows),
        partition=part,
    )


@dataclass(frozen=True, eq=False)
class BucketizedTables:
    """Anatomy output: exact QI values with bucket ids, and per-bucket
    sensitive value counts."""

    schema: Schema
    source: Table
    bucket_of_row: tuple[int, ...]

    def __post_init__(self):
        for bucket in self.buckets:
            values = [self.source.rows[i].sensitive for i in bucket]
            if len(set(values)) != len(values):
                raise DataError("anatomy bucket holds a repeated sensitive value")

    @property
    def num_buckets(self) -> int:
        return max(self.bucket_of_row) + 1

    @property
    def buckets(self) -> tuple[tuple[int, ...], ...]:
        if not hasattr(self, "_buckets"):
            groups: list[list[int]] = [[] for _ in range(self.num_buckets)]
            for row, b in enumerate(self.bucket_of_row):
                groups[b].append(row)
            object.__setattr__(self, "_buckets", tuple(tuple(g) for g in groups))
        return self._buckets

    def sensitive_counts(self) -> list[tuple[int, Value, int]]:
        """(bucket id, sensitive value, count) rows of the sensitive table."""
        out = []
        sort_key = self.schema.sensitive_attribute.sort_key
        for b, bucket in enumerate(self.buckets):
            counts = Counter(self.source.rows[i].sensitive for i in bucket)
            for value in sorted(counts, key=sort_key):
                out.append((b, value, counts[value]))
        return out


def anatomy_bucketize(table: Table, l: int, seed: int) -> BucketizedTables:
    """Greedy most-frequent-first bucketization with l distinct sensitive
    values per bucket; residue rows join a bucket lacking their value."""
    if l < 1:
        raise DataError("l must be a positive integer")
    n = len(table)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sort_key = table.schema.sensitive_attribute.sort_key

    pools: dict[Value, list[int]] = {}
    for i, row in enumerate(table.rows):
        pools.setdefault(row.sensitive, []).append(i)
    if any(len(rows) * l > n for rows in pools.values()):
        worst = max(pools.values(), key=len)
        raise DataError(
            f"table is not l-eligible at l={l}: a sensitive value occurs "
            f"{len(worst)} times over {n} rows"
        )

    bucket_of_row = [-1] * n
    bucket_values: list[set[Value]] = []
    bucket_rows: list[list[int]] = []
    while sum(1 for rows in pools.values() if rows) >= l:
        ranked = sorted(
            (v for v, rows in pools.items() if rows),
            key=lambda v: (-len(pools[v]), sort_key(v)),
        )
        chosen = ranked[:l]
        bucket_id = len(bucket_rows)
        members = []
        for value in chosen:
            pool = pools[value]
            row = pool.pop(int(rng.integers(len(pool))))
            members.append(row)
            bucket_of_row[row] = bucket_id
        bucket_rows.append(members)
        bucket_values.append(set(table.rows[i].sensitive for i in members))

    for value in sorted(pools, key=sort_key):
        for row in pools[value]:
            target = None
            for b in sorted(range(len(bucket_rows)), key=lambda b: (len(bucket_rows[b]), b)):
                if value not in bucket_values[b]:
                    target = b
                    break
            if target is None:
                raise DataError("anatomy residue row fits no bucket; table is not l-eligible")
            bucket_of_row[row] = target
            bucket_rows[target].append(row)
            bucket_values[target].add(value)

    return BucketizedTables(schema=table.schema, source=table, bucket_of_row=tuple(bucket_of_row))
