from __future__ import annotations

import numpy as np
import pytest

from mutualcover.schema import CATEGORICAL, CONTINUOUS, AttributeSchema, Schema
from mutualcover.table import Row, Table


@pytest.fixture
def age_attr() -> AttributeSchema:
    return AttributeSchema(name="age", kind=CONTINUOUS, lo=0, hi=120)


@pytest.fixture
def gender_attr() -> AttributeSchema:
    return AttributeSchema(name="gender", kind=CATEGORICAL, labels=("Male", "Female"))


@pytest.fixture
def two_qi_schema(age_attr, gender_attr) -> Schema:
    return Schema(
        qi_attributes=(age_attr, gender_attr),
        sensitive_attribute=AttributeSchema(name="disease", kind=CATEGORICAL,
                                            labels=("flu", "cancer", "gastritis", "pneumonia")),
    )


def make_table(schema: Schema, rows: list[tuple]) -> Table:
    return Table(schema=schema, rows=tuple(Row(qi=tuple(r[:-1]), sensitive=r[-1]) for r in rows))


@pytest.fixture
def small_table(two_qi_schema) -> Table:
    return make_table(two_qi_schema, [
        (25, "Male", "flu"),
        (28, "Female", "cancer"),
        (29, "Male", "flu"),
        (34, "Female", "gastritis"),
    ])


def random_table(rng: np.random.Generator, n_rows: int, n_sensitive: int = 8,
                 age_span: tuple[int, int] = (0, 30)) -> Table:
    """Small fuzz table with one continuous and one categorical QI attribute."""
    schema = Schema(
        qi_attributes=(
            AttributeSchema(name="age", kind=CONTINUOUS, lo=age_span[0], hi=age_span[1]),
            AttributeSchema(name="group", kind=CATEGORICAL, labels=("a", "b", "c")),
        ),
        sensitive_attribute=AttributeSchema(
            name="value", kind=CONTINUOUS, lo=0, hi=max(1, n_sensitive - 1)),
    )
    rows = []
    for _ in range(n_rows):
        rows.append(Row(
            qi=(int(rng.integers(age_span[0], age_span[1] + 1)),
                ("a", "b", "c")[rng.integers(3)]),
            sensitive=int(rng.integers(n_sensitive)),
        ))
    return Table(schema=schema, rows=tuple(rows))
