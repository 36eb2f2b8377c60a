"""Metrics over published views: disclosure risk, information loss, and
SUM-query accuracy.

Disclosure estimator. The adversary knows the target's original QI values
and includes each one in the match predicate independently with probability
p_match. The matching set is every published row consistent with the
predicate: exact value match for randomized tables, region containment for
generalized tables, QI-table match for Anatomy. Per trial and target, the
identity contribution is [own row matched] / |matches| and the attribute
contribution is the fraction of matches sharing the target's sensitive
value; empty predicates and empty matching sets contribute zero. Reported
numbers are means over rows and trials with the seed recorded.

Query error. For interval schemes R_error = (upper - lower) / actual. A
randomized table gives a point estimate, so its interval form is zero by
construction; the point form |estimate - actual| / actual is reported
alongside and is the right number to compare against interval schemes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .anonymize import AnonymizedTable
from .baselines import BucketizedTables, GeneralizedTable, Region
from .errors import DataError
from .schema import CATEGORICAL, Schema, Value, distance
from .table import Table

NUMERIC_OPS = (">", "<", "=", ">=", "<=", "!=")


def _as_table(published: Union[Table, AnonymizedTable]) -> Table:
    return published.table if isinstance(published, AnonymizedTable) else published


# ---------------------------------------------------------------------------
# Re-identification probability (single released QI value)
# ---------------------------------------------------------------------------

def value_reid_probability(
    case_probs: Mapping[int, float],
    target_included_given_k: Mapping[int, float] | Callable[[int], float] | None = None,
) -> float:
    """Probability of re-identifying the target from one released value.

    ``case_probs[k]`` is the probability that exactly k published records
    carry the value, jointly with the inclusion model's conditioning; the
    adversary then picks the right record with probability 1/k. The default
    inclusion model treats the target as certainly among the k matches.
    """
    total = 0.0
    mass = 0.0
    for k, p in case_probs.items():
        if k < 1:
            raise DataError(f"case count must be >= 1, got {k}")
        if not (0.0 <= p <= 1.0):
            raise DataError(f"case probability {p} outside [0, 1]")
        mass += p
        if target_included_given_k is None:
            inclusion = 1.0
        elif callable(target_included_given_k):
            inclusion = target_included_given_k(k)
        else:
            inclusion = target_included_given_k.get(k, 1.0)
        if not (0.0 <= inclusion <= 1.0):
            raise DataError(f"inclusion probability {inclusion} outside [0, 1]")
        total += p * inclusion / k
    if mass > 1.0 + 1e-9:
        raise DataError(f"case probabilities sum to {mass} > 1")
    return total


def exact_reid_case_probs(emit_probs: Sequence[float], target_index: int) -> dict[int, float]:
    """Exact distribution over "k records emit the value, target among them".

    ``emit_probs[i]`` is record i's probability of publishing the target's
    value. Emissions are independent; the count distribution of the other
    records is built by exact convolution, which aggregates the 2^(m-1)
    emission outcomes without enumerating them one by one.
    """
    probs = np.asarray(emit_probs, dtype=np.float64)
    if probs.ndim != 1 or probs.size == 0:
        raise DataError("emit_probs must be a non-empty vector")
    if probs.min() < 0.0 or probs.max() > 1.0:
        raise DataError("emission probabilities must lie in [0, 1]")
    if not (0 <= target_index < probs.size):
        raise DataError("target index out of range")
    others = np.delete(probs, target_index)
    dist = np.ones(1)
    for p in others:
        nxt = np.zeros(dist.size + 1)
        nxt[: dist.size] += dist * (1.0 - p)
        nxt[1:] += dist * p
        dist = nxt
    q = float(probs[target_index])
    return {k + 1: q * float(dist[k]) for k in range(dist.size)}


def exact_reid_probability(emit_probs: Sequence[float], target_index: int) -> float:
    """Re-identification probability of the target from its own value."""
    return value_reid_probability(exact_reid_case_probs(emit_probs, target_index))


# ---------------------------------------------------------------------------
# Published views
# ---------------------------------------------------------------------------

class ExactView:
    """A published table carrying exact per-row QI values (an original table,
    a mutual-cover output, or Anatomy's QI table)."""

    def __init__(self, published: Union[Table, AnonymizedTable]):
        table = _as_table(published)
        self.table = table
        self.schema = table.schema
        self._columns = table.qi_key_arrays
        self._sensitive = list(table.sensitive_values())

    def __len__(self) -> int:
        return len(self.table)

    def _code(self, attr_index: int, value: Value) -> int:
        attr = self.schema.qi_attributes[attr_index]
        return value if attr.is_continuous else attr.labels.index(value)

    def match_mask(self, attr_indices: Sequence[int], values: Sequence[Value]) -> np.ndarray:
        mask = np.ones(len(self.table), dtype=bool)
        for j, value in zip(attr_indices, values):
            mask &= self._columns[j] == self._code(j, value)
        return mask

    def sensitive_matches(self, mask: np.ndarray, value: Value) -> float:
        return float(sum(1 for i in np.flatnonzero(mask) if self._sensitive[i] == value))


class GeneralizedView:
    """A generalized table; a row matches a value when its region contains it."""

    def __init__(self, published: GeneralizedTable):
        self.generalized = published
        self.schema = published.schema
        self._owner = published.group_of_row
        self._sensitive = published.sensitive

    def __len__(self) -> int:
        return len(self.generalized)

    def _group_mask(self, attr_indices: Sequence[int], values: Sequence[Value]) -> np.ndarray:
        groups = self.generalized.group_regions
        mask = np.ones(len(groups), dtype=bool)
        for g, regions in enumerate(groups):
            for j, value in zip(attr_indices, values):
                lo_hi_or_set = regions[j]
                if isinstance(lo_hi_or_set, frozenset):
                    if value not in lo_hi_or_set:
                        mask[g] = False
                        break
                else:
                    lo, hi = lo_hi_or_set
                    if not (lo <= value <= hi):
                        mask[g] = False
                        break
        return mask

    def match_mask(self, attr_indices: Sequence[int], values: Sequence[Value]) -> np.ndarray:
        return self._group_mask(attr_indices, values)[self._owner]

    def sensitive_matches(self, mask: np.ndarray, value: Value) -> float:
        return float(sum(1 for i in np.flatnonzero(mask) if self._sensitive[i] == value))


class AnatomyView:
    """Anatomy's linked tables. Matching runs on the exact QI table; the
    sensitive side of a matched row is only known as its bucket's value
    distribution, so sensitive matches are counted in expectation."""

    def __init__(self, published: BucketizedTables):
        self.buckets = published
        self.schema = published.schema
        self._exact = ExactView(published.source)
        self._bucket_of_row = np.asarray(published.bucket_of_row, dtype=np.int64)
        n_buckets = published.num_buckets
        values = sorted(
            {r.sensitive for r in published.source.rows},
            key=self.schema.sensitive_attribute.sort_key,
        )
        self._value_code = {v: k for k, v in enumerate(values)}
        counts = np.zeros((n_buckets, len(values)))
        for row, b in enumerate(published.bucket_of_row):
            counts[b, self._value_code[published.source.rows[row].sensitive]] += 1
        self._counts = counts
        self._sizes = counts.sum(axis=1)

    def __len__(self) -> int:
        return len(self.buckets.source)

    def match_mask(self, attr_indices: Sequence[int], values: Sequence[Value]) -> np.ndarray:
        return self._exact.match_mask(attr_indices, values)

    def sensitive_matches(self, mask: np.ndarray, value: Value) -> float:
        code = self._value_code.get(value)
        if code is None:
            return 0.0
        weight_per_bucket = self._counts[:, code] / self._sizes
        return float(weight_per_bucket[self._bucket_of_row[mask]].sum())


View = Union[ExactView, GeneralizedView, AnatomyView]


def make_view(published) -> View:
    if isinstance(published, (Table, AnonymizedTable)):
        return ExactView(published)
    if isinstance(published, GeneralizedTable):
        return GeneralizedView(published)
    if isinstance(published, BucketizedTables):
        return AnatomyView(published)
    raise DataError(f"cannot build a published view from {type(published).__name__}")


# ---------------------------------------------------------------------------
# Disclosure simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DisclosureReport:
    identity_probability: float
    attribute_probability: float
    p_match: float
    trials: int
    seed: int
    row_count: int

    def __post_init__(self):
        for p in (self.identity_probability, self.attribute_probability):
            if not (0.0 <= p <= 1.0):
                raise DataError(f"disclosure probability {p} outside [0, 1]")


def disclosure_simulation(
    original: Table,
    published,
    p_match: float,
    trials: int = 20,
    seed: int = 0,
) -> DisclosureReport:
    """Monte-Carlo estimate of identity and attribute disclosure per tuple."""
    if not (0.0 <= p_match <= 1.0):
        raise DataError(f"p_match must be in [0, 1], got {p_match}")
    if trials < 1:
        raise DataError("trials must be >= 1")
    view = published if isinstance(published, (ExactView, GeneralizedView, AnatomyView)) else make_view(published)
    if len(view) != len(original):
        raise DataError("published view must cover the same row set as the original")

    n = len(original)
    d = len(original.schema.qi_attributes)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    identity_total = 0.0
    attribute_total = 0.0
    for _ in range(trials):
        include = rng.random((n, d)) < p_match
        for t in range(n):
            attrs = np.flatnonzero(include[t])
            if attrs.size == 0:
                continue
            target = original.rows[t]
            mask = view.match_mask(attrs, [target.qi[j] for j in attrs])
            count = int(mask.sum())
            if count == 0:
                continue
            if mask[t]:
                identity_total += 1.0 / count
            attribute_total += view.sensitive_matches(mask, target.sensitive) / count
    scale = float(n * trials)
    return DisclosureReport(
        identity_probability=identity_total / scale,
        attribute_probability=attribute_total / scale,
        p_match=p_match,
        trials=trials,
        seed=seed,
        row_count=n,
    )


# ---------------------------------------------------------------------------
# Information loss
# ---------------------------------------------------------------------------

def iloss(original: Table, anonymized) -> float:
    """Information loss of a randomized table: per QI cell, the distance
    from the original value divided by the attribute's domain size, summed
    over all rows and QI attributes."""
    published = _as_table(anonymized)
    if published.schema != original.schema:
        raise DataError("information loss needs tables over the same schema")
    if len(published) != len(original):
        raise DataError("information loss needs tables of the same shape")
    total = 0.0
    for j, attr in enumerate(original.schema.qi_attributes):
        size = attr.domain_size
        for orig_row, new_row in zip(original.rows, published.rows):
            v, w = orig_row.qi[j], new_row.qi[j]
            if v != w:
                total += distance(attr, v, w) / size
    return total


def generalization_iloss(generalized: GeneralizedTable) -> float:
    """Information loss of a generalized table: per QI cell, (number of
    domain values covered - 1) divided by the domain size, summed."""
    total = 0.0
    owner = generalized.group_of_row
    for g, regions in enumerate(generalized.group_regions):
        group_size = int((owner == g).sum())
        per_row = 0.0
        for j, attr in enumerate(generalized.schema.qi_attributes):
            region = regions[j]
            covered = len(region) if isinstance(region, frozenset) else region[1] - region[0] + 1
            per_row += (covered - 1) / attr.domain_size
        total += per_row * group_size
    return total


# ---------------------------------------------------------------------------
# SUM-query workload
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Predicate:
    attribute: str
    values: tuple[str, ...] | None = None    # categorical: (A=v1 or ... or A=vm)
    op: str | None = None                    # numeric: one of NUMERIC_OPS
    value: int | None = None

    def __post_init__(self):
        if (self.values is None) == (self.op is None):
            raise DataError("predicate must be categorical or numeric, not both")
        if self.op is not None and self.op not in NUMERIC_OPS:
            raise DataError(f"unknown numeric operator {self.op!r}")
        if self.values is not None and len(self.values) == 0:
            raise DataError("categorical predicate needs at least one value")


@dataclass(frozen=True)
class Query:
    predicates: tuple[Predicate, ...]

    def __post_init__(self):
        names = [p.attribute for p in self.predicates]
        if len(set(names)) != len(names):
            raise DataError("query predicates must use distinct attributes")


@dataclass(frozen=True)
class QueryWorkload:
    queries: tuple[Query, ...]
    seed: int


def _numeric_row_mask(column: np.ndarray, op: str, value: int) -> np.ndarray:
    if op == ">":
        return column > value
    if op == "<":
        return column < value
    if op == "=":
        return column == value
    if op == ">=":
        return column >= value
    if op == "<=":
        return column <= value
    return column != value


def exact_query_mask(table: Table, query: Query) -> np.ndarray:
    """Rows of an exact-valued table satisfying every predicate."""
    schema = table.schema
    mask = np.ones(len(table), dtype=bool)
    for pred in query.predicates:
        j = schema.qi_index(pred.attribute)
        attr = schema.qi_attributes[j]
        column = table.qi_key_arrays[j]
        if pred.values is not None:
            codes = [attr.labels.index(v) for v in pred.values]
            mask &= np.isin(column, codes)
        else:
            mask &= _numeric_row_mask(column, pred.op, pred.value)
    return mask


def generate_workload(
    schema: Schema,
    count: int,
    seed: int,
    table: Table | None = None,
) -> QueryWorkload:
    """Random SUM-query workload: each query holds predicates on 4 distinct
    QI attributes. Categorical predicates include each label with
    probability 1/2 (redrawn while empty); numeric predicates pick one of
    the six comparison operators and a uniform domain value. When a table
    is supplied, queries whose actual sum is zero are redrawn so relative
    errors stay well-defined."""
    attrs = schema.qi_attributes
    if len(attrs) < 4:
        raise DataError(f"workload needs at least 4 QI attributes, schema has {len(attrs)}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    sensitive = table.sensitive_numeric if table is not None else None

    queries: list[Query] = []
    attempts = 0
    while len(queries) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise DataError("could not draw a workload with non-zero actual sums")
        chosen = rng.permutation(len(attrs))[:4]
        predicates = []
        for j in sorted(int(x) for x in chosen):
            attr = attrs[j]
            if attr.kind == CATEGORICAL:
                while True:
                    picks = rng.random(len(attr.labels)) < 0.5
                    if picks.any():
                        break
                predicates.append(Predicate(
                    attribute=attr.name,
                    values=tuple(lbl for lbl, take in zip(attr.labels, picks) if take),
                ))
            else:
                op = NUMERIC_OPS[int(rng.integers(len(NUMERIC_OPS)))]
                value = int(rng.integers(attr.lo, attr.hi + 1))
                predicates.append(Predicate(attribute=attr.name, op=op, value=value))
        query = Query(predicates=tuple(predicates))
        if table is not None:
            actual = int(sensitive[exact_query_mask(table, query)].sum())
            if actual == 0:
                continue
        queries.append(query)
    return QueryWorkload(queries=tuple(queries), seed=seed)


# ---------------------------------------------------------------------------
# Query evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QueryError:
    sum_actual: int
    sum_lower: float
    sum_upper: float
    sum_estimate: float | None
    interval_error: float
    point_error: float | None


def _region_vs_numeric(lo: int, hi: int, op: str, value: int) -> tuple[bool, bool]:
    """(entirely inside, intersects) for an integer range against a
    numeric predicate."""
    if op == ">":
        return lo > value, hi > value
    if op == "<":
        return hi < value, lo < value
    if op == ">=":
        return lo >= value, hi >= value
    if op == "<=":
        return hi <= value, lo <= value
    if op == "=":
        return lo == hi == value, lo <= value <= hi
    return value < lo or value > hi, not (lo == hi == value)


def _region_status(regions: Sequence[Region], query: Query, schema: Schema) -> tuple[bool, bool]:
    contained = True
    intersects = True
    for pred in query.predicates:
        j = schema.qi_index(pred.attribute)
        region = regions[j]
        if pred.values is not None:
            allowed = set(pred.values)
            inside = region if isinstance(region, frozenset) else set()
            contained &= inside <= allowed
            intersects &= bool(inside & allowed)
        else:
            lo, hi = region
            c, i = _region_vs_numeric(lo, hi, pred.op, pred.value)
            contained &= c
            intersects &= i
        if not intersects:
            return False, False
    return contained, intersects


def evaluate_query(query: Query, original: Table, published) -> QueryError:
    """Bounds and estimates for one SUM query over a published view."""
    actual = int(original.sensitive_numeric[exact_query_mask(original, query)].sum())
    if actual == 0:
        raise DataError("query has zero actual sum; redraw it at workload level")

    if isinstance(published, (Table, AnonymizedTable)):
        published_table = _as_table(published)
        estimate = float(published_table.sensitive_numeric[exact_query_mask(published_table, query)].sum())
        lower = upper = estimate
    elif isinstance(published, GeneralizedTable):
        owner = published.group_of_row
        sensitive = np.asarray(published.sensitive, dtype=np.float64)
        lower = upper = 0.0
        for g, regions in enumerate(published.group_regions):
            contained, intersects = _region_status(regions, query, published.schema)
            if not intersects:
                continue
            group_sum = float(sensitive[owner == g].sum())
            upper += group_sum
            if contained:
                lower += group_sum
        estimate = None
    elif isinstance(published, BucketizedTables):
        mask = exact_query_mask(published.source, query)
        bucket_of_row = np.asarray(published.bucket_of_row)
        k_per_bucket = np.bincount(bucket_of_row[mask], minlength=published.num_buckets)
        lower = upper = estimate = 0.0
        for b, bucket in enumerate(published.buckets):
            k = int(k_per_bucket[b])
            if k == 0:
                continue
            values = np.sort(np.asarray(
                [published.source.rows[i].sensitive for i in bucket], dtype=np.float64))
            lower += float(values[:k].sum())
            upper += float(values[-k:].sum())
            estimate += k * float(values.mean())
    else:
        raise DataError(f"cannot evaluate a query over {type(published).__name__}")

    if not isinstance(published, (Table, AnonymizedTable)):
        if not (lower - 1e-9 <= actual <= upper + 1e-9):
            raise DataError("query bounds do not bracket the actual sum")
    interval_error = (upper - lower) / abs(actual)
    point_error = None if estimate is None else abs(estimate - actual) / abs(actual)
    return QueryError(
        sum_actual=actual,
        sum_lower=lower,
        sum_upper=upper,
        sum_estimate=estimate,
        interval_error=interval_error,
        point_error=point_error,
    )


def relative_error(query: Query, original: Table, published) -> float:
    """Interval-form relative error (upper - lower) / actual."""
    return evaluate_query(query, original, published).interval_error
