"""Attribute schemas, value domains, and the distance functions between values.

An attribute is either categorical (an ordered list of labels) or
continuous-integer (an inclusive [lo, hi] range). Distances are numeric-l1
for continuous attributes and flat 0/1 for categorical ones unless a
pairwise distance matrix is supplied.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

from .errors import SchemaError

Value = Union[int, str]

CATEGORICAL = "categorical"
CONTINUOUS = "continuous-integer"

DISTANCE_L1 = "numeric-l1"
DISTANCE_FLAT = "categorical-flat"
DISTANCE_MATRIX = "categorical-matrix"


@dataclass(frozen=True)
class AttributeSchema:
    """One attribute: name, kind, domain, and how values are compared.

    For categorical attributes ``labels`` is the ordered domain; ``lo``/``hi``
    are ignored. For continuous-integer attributes the domain is every integer
    in [lo, hi]. ``distance_matrix``, when given for a categorical attribute,
    holds pairwise distances indexed by label position.
    """

    name: str
    kind: str
    labels: tuple[str, ...] = ()
    lo: int = 0
    hi: int = 0
    distance_matrix: tuple[tuple[float, ...], ...] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if self.kind == CATEGORICAL:
            if not self.labels:
                raise SchemaError(f"attribute {self.name!r}: categorical domain is empty")
            if any(not lbl for lbl in self.labels):
                raise SchemaError(f"attribute {self.name!r}: empty categorical label")
            if len(set(self.labels)) != len(self.labels):
                raise SchemaError(f"attribute {self.name!r}: duplicate categorical labels")
            if self.distance_matrix is not None:
                self._check_matrix()
        elif self.kind == CONTINUOUS:
            if not (isinstance(self.lo, int) and isinstance(self.hi, int)):
                raise SchemaError(f"attribute {self.name!r}: continuous bounds must be integers")
            if self.lo > self.hi:
                raise SchemaError(f"attribute {self.name!r}: lo {self.lo} > hi {self.hi}")
            if self.distance_matrix is not None:
                raise SchemaError(f"attribute {self.name!r}: distance matrix requires a categorical kind")
        else:
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")

    def _check_matrix(self):
        mat = self.distance_matrix
        k = len(self.labels)
        if len(mat) != k or any(len(row) != k for row in mat):
            raise SchemaError(f"attribute {self.name!r}: distance matrix must be {k}x{k}")
        for i in range(k):
            if mat[i][i] != 0:
                raise SchemaError(f"attribute {self.name!r}: distance matrix diagonal must be zero")
            for j in range(k):
                if mat[i][j] < 0:
                    raise SchemaError(f"attribute {self.name!r}: negative distance at ({i}, {j})")
                if mat[i][j] != mat[j][i]:
                    raise SchemaError(f"attribute {self.name!r}: distance matrix must be symmetric")

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS

    @property
    def distance_spec(self) -> str:
        if self.kind == CONTINUOUS:
            return DISTANCE_L1
        return DISTANCE_MATRIX if self.distance_matrix is not None else DISTANCE_FLAT

    @property
    def domain_size(self) -> int:
        """Number of values in the domain (|D_A|)."""
        if self.kind == CONTINUOUS:
            return self.hi - self.lo + 1
        return len(self.labels)

    def contains(self, value: Value) -> bool:
        if self.kind == CONTINUOUS:
            return isinstance(value, int) and self.lo <= value <= self.hi
        return value in self.labels

    def check(self, value: Value) -> Value:
        """Return the value unchanged, raising SchemaError if out of domain."""
        if not self.contains(value):
            raise SchemaError(f"attribute {self.name!r}: value {value!r} outside declared domain")
        return value

    def sort_key(self, value: Value) -> int:
        """Canonical order: numeric order, or declared label order."""
        if self.kind == CONTINUOUS:
            return value
        return self.labels.index(value)

    def parse(self, text: str) -> Value:
        """Parse a CSV cell into a domain value (no domain check)."""
        if self.kind == CONTINUOUS:
            try:
                return int(text.strip())
            except ValueError:
                raise SchemaError(f"attribute {self.name!r}: cannot parse {text!r} as integer") from None
        return text


def distance(attr: AttributeSchema, v1: Value, v2: Value) -> float:
    """Distance between two in-domain values of one attribute.

    Symmetric and non-negative. Continuous attributes use |v1 - v2|;
    categorical attributes use flat 0/1 unless the schema carries a
    pairwise matrix, in which case the stored entry is returned.
    """
    attr.check(v1)
    attr.check(v2)
    if attr.kind == CONTINUOUS:
        return float(abs(v1 - v2))
    if attr.distance_matrix is not None:
        return float(attr.distance_matrix[attr.labels.index(v1)][attr.labels.index(v2)])
    return 0.0 if v1 == v2 else 1.0


@dataclass(frozen=True)
class Schema:
    """QI attributes (ordered) plus exactly one sensitive attribute."""

    qi_attributes: tuple[AttributeSchema, ...]
    sensitive_attribute: AttributeSchema

    def __post_init__(self):
        if not self.qi_attributes:
            raise SchemaError("schema needs at least one QI attribute")
        names = [a.name for a in self.qi_attributes] + [self.sensitive_attribute.name]
        if len(set(names)) != len(names):
            raise SchemaError("attribute names must be distinct")

    @property
    def qi_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.qi_attributes)

    @property
    def column_names(self) -> tuple[str, ...]:
        return self.qi_names + (self.sensitive_attribute.name,)

    def qi_index(self, name: str) -> int:
        for i, a in enumerate(self.qi_attributes):
            if a.name == name:
                return i
        raise SchemaError(f"no QI attribute named {name!r}")

    def attribute(self, name: str) -> AttributeSchema:
        if name == self.sensitive_attribute.name:
            return self.sensitive_attribute
        return self.qi_attributes[self.qi_index(name)]


def _attribute_from_dict(spec: dict) -> AttributeSchema:
    try:
        name = spec["name"]
        kind = spec["kind"]
    except KeyError as exc:
        raise SchemaError(f"attribute entry missing field {exc}") from None
    if kind in ("continuous", CONTINUOUS):
        try:
            lo, hi = spec["range"]
        except (KeyError, ValueError, TypeError):
            raise SchemaError(f"attribute {name!r}: continuous kind needs \"range\": [lo, hi]") from None
        return AttributeSchema(name=name, kind=CONTINUOUS, lo=int(lo), hi=int(hi))
    if kind == CATEGORICAL:
        labels = spec.get("labels")
        if not isinstance(labels, list):
            raise SchemaError(f"attribute {name!r}: categorical kind needs \"labels\": [...]")
        matrix = spec.get("distance_matrix")
        if matrix is not None:
            matrix = tuple(tuple(float(x) for x in row) for row in matrix)
        return AttributeSchema(name=name, kind=CATEGORICAL, labels=tuple(labels), distance_matrix=matrix)
    raise SchemaError(f"attribute {name!r}: unknown kind {kind!r}")


def schema_from_dict(data: dict) -> Schema:
    try:
        qi_specs = data["qi_attributes"]
        sens_spec = data["sensitive_attribute"]
    except KeyError as exc:
        raise SchemaError(f"schema document missing field {exc}") from None
    return Schema(
        qi_attributes=tuple(_attribute_from_dict(s) for s in qi_specs),
        sensitive_attribute=_attribute_from_dict(sens_spec),
    )


def schema_to_dict(schema: Schema) -> dict:
    def one(a: AttributeSchema) -> dict:
        if a.kind == CONTINUOUS:
            return {"name": a.name, "kind": "continuous", "range": [a.lo, a.hi]}
        out = {"name": a.name, "kind": CATEGORICAL, "labels": list(a.labels)}
        if a.distance_matrix is not None:
            out["distance_matrix"] = [list(row) for row in a.distance_matrix]
        return out

    return {
        "qi_attributes": [one(a) for a in schema.qi_attributes],
        "sensitive_attribute": one(schema.sensitive_attribute),
    }


def load_schema(path: str | Path) -> Schema:
    """Load a schema from a JSON document (see README for the field names)."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return schema_from_dict(data)


def save_schema(schema: Schema, path: str | Path) -> None:
    Path(path).write_text(json.dumps(schema_to_dict(schema), indent=2) + "\n", encoding="utf-8")
