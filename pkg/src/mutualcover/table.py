"""Microdata tables: CSV ingestion, column access, candidate values.

Tables are immutable after construction and safe to share across workers.
Row identity is the stable 0-based position in the file.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DataError
from .schema import AttributeSchema, Schema, Value

MODE_OBSERVED = "observed"
MODE_SPAN = "span"


class Row(NamedTuple):
    qi: tuple[Value, ...]
    sensitive: Value


@dataclass(frozen=True, eq=False)
class Table:
    schema: Schema
    rows: tuple[Row, ...]

    def __post_init__(self):
        if not self.rows:
            raise DataError("table has no rows")

    def __len__(self) -> int:
        return len(self.rows)

    def qi_values(self, attr_index: int, indices: Sequence[int] | None = None) -> list[Value]:
        if indices is None:
            return [r.qi[attr_index] for r in self.rows]
        return [self.rows[i].qi[attr_index] for i in indices]

    def sensitive_values(self, indices: Sequence[int] | None = None) -> list[Value]:
        if indices is None:
            return [r.sensitive for r in self.rows]
        return [self.rows[i].sensitive for i in indices]

    @cached_property
    def qi_key_arrays(self) -> tuple[np.ndarray, ...]:
        """Per QI attribute, the canonical sort key of every row (int64)."""
        arrays = []
        for j, attr in enumerate(self.schema.qi_attributes):
            if attr.is_continuous:
                arrays.append(np.fromiter((r.qi[j] for r in self.rows), dtype=np.int64, count=len(self.rows)))
            else:
                index = {lbl: i for i, lbl in enumerate(attr.labels)}
                arrays.append(np.fromiter((index[r.qi[j]] for r in self.rows), dtype=np.int64, count=len(self.rows)))
        return tuple(arrays)

    @cached_property
    def sensitive_codes(self) -> np.ndarray:
        """Sensitive column coded over the distinct values present (int64)."""
        distinct = self.distinct_sensitive_values
        index = {v: i for i, v in enumerate(distinct)}
        return np.fromiter((index[r.sensitive] for r in self.rows), dtype=np.int64, count=len(self.rows))

    @cached_property
    def distinct_sensitive_values(self) -> tuple[Value, ...]:
        attr = self.schema.sensitive_attribute
        return tuple(sorted({r.sensitive for r in self.rows}, key=attr.sort_key))

    @cached_property
    def sensitive_numeric(self) -> np.ndarray:
        """Sensitive column as int64; only valid for a continuous sensitive attribute."""
        if not self.schema.sensitive_attribute.is_continuous:
            raise DataError("sensitive attribute is categorical; no numeric view")
        return np.fromiter((r.sensitive for r in self.rows), dtype=np.int64, count=len(self.rows))

    def replace_qi(self, new_qi: Sequence[tuple[Value, ...]]) -> "Table":
        """New table with the same schema/sensitive column and replaced QI vectors."""
        if len(new_qi) != len(self.rows):
            raise DataError("replacement QI row count mismatch")
        rows = tuple(Row(qi=tuple(q), sensitive=r.sensitive) for q, r in zip(new_qi, self.rows))
        return Table(schema=self.schema, rows=rows)


def load_table(csv_path: str | Path, schema: Schema) -> Table:
    """Read a CSV into a Table, validating every cell against the schema.

    The header must cover all schema attributes; extra columns are dropped.
    Errors report the 0-based data row and the column name.
    """
    path = Path(csv_path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [name for name in schema.column_names if name not in header]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
        attrs = list(schema.qi_attributes) + [schema.sensitive_attribute]
        rows = []
        for row_idx, record in enumerate(reader):
            values = []
            for attr in attrs:
                cell = record.get(attr.name)
                if cell is None:
                    raise DataError(f"{path}: row {row_idx}: missing cell in column {attr.name!r}")
                try:
                    value = attr.check(attr.parse(cell))
                except Exception as exc:
                    raise DataError(f"{path}: row {row_idx}, column {attr.name!r}: {exc}") from None
                values.append(value)
            rows.append(Row(qi=tuple(values[:-1]), sensitive=values[-1]))
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Table(schema=schema, rows=tuple(rows))


def write_table_csv(table: Table, csv_path: str | Path) -> None:
    """Write the table back to CSV in column order qi..., sensitive."""
    path = Path(csv_path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(table.schema.column_names)
        for row in table.rows:
            writer.writerow(list(row.qi) + [row.sensitive])


def candidate_values(values: Sequence[Value], attr: AttributeSchema, mode: str = MODE_OBSERVED) -> list[Value]:
    """Ordered candidate list for one attribute over a set of rows.

    observed: the sorted distinct values present. span: for continuous
    attributes, every integer between the observed min and max; identical
    to observed for categorical attributes.
    """
    if not values:
        raise DataError("candidate_values needs at least one row")
    if mode not in (MODE_OBSERVED, MODE_SPAN):
        raise DataError(f"unknown candidate mode {mode!r}")
    if attr.is_continuous and mode == MODE_SPAN:
        return list(range(min(values), max(values) + 1))
    return sorted(set(values), key=attr.sort_key)


def max_distance(values: Sequence[Value], attr: AttributeSchema) -> float:
    """Maximum pairwise distance over the values present; 0 when all equal."""
    if not values:
        raise DataError("max_distance needs at least one row")
    distinct = set(values)
    if len(distinct) <= 1:
        return 0.0
    if attr.is_continuous:
        return float(max(distinct) - min(distinct))
    if attr.distance_matrix is None:
        return 1.0
    codes = sorted(attr.labels.index(v) for v in distinct)
    return max(attr.distance_matrix[i][j] for i in codes for j in codes)


def iter_qi_vectors(rows: Iterable[Row]) -> Iterable[tuple[Value, ...]]:
    for row in rows:
        yield row.qi
