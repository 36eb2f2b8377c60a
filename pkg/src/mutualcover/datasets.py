"""Seeded synthetic tables for experiments, demos, and tests.

The main generator produces a census-shaped table: seven QI attributes
(two continuous, five categorical) and a salary column correlated with
age, hours, and education. Categorical label frequencies are skewed so
that small QI groups carry rare labels, which is what makes the
replacement distributions actually mix records instead of degenerating
to identity.
"""
from __future__ import annotations

import numpy as np

from .schema import CATEGORICAL, CONTINUOUS, AttributeSchema, Schema
from .table import Row, Table

EDUCATION_LEVELS = (
    "none", "primary", "secondary", "highschool",
    "college", "bachelor", "master", "doctorate",
)


def synthetic_schema() -> Schema:
    return Schema(
        qi_attributes=(
            AttributeSchema(name="gender", kind=CATEGORICAL, labels=("Male", "Female")),
            AttributeSchema(name="age", kind=CONTINUOUS, lo=30, hi=49),
            AttributeSchema(name="relationship", kind=CATEGORICAL,
                            labels=tuple(f"relationship_{i}" for i in range(13))),
            AttributeSchema(name="marital_status", kind=CATEGORICAL,
                            labels=tuple(f"marital_{i}" for i in range(6))),
            AttributeSchema(name="race", kind=CATEGORICAL,
                            labels=tuple(f"race_{i}" for i in range(9))),
            AttributeSchema(name="education", kind=CATEGORICAL, labels=EDUCATION_LEVELS),
            AttributeSchema(name="hours", kind=CONTINUOUS, lo=35, hi=44),
        ),
        sensitive_attribute=AttributeSchema(name="salary", kind=CONTINUOUS, lo=0, hi=1500),
    )


def _skewed_codes(rng: np.random.Generator, size: int, n_labels: int, decay: float) -> np.ndarray:
    weights = decay ** np.arange(n_labels)
    return rng.choice(n_labels, size=size, p=weights / weights.sum())


def synthetic_table(rows: int = 2000, seed: int = 0) -> Table:
    """Census-shaped correlated table: salary grows with age, hours, and
    education; categorical label frequencies are skewed so small groups
    carry rare labels and the replacement distributions genuinely mix."""
    schema = synthetic_schema()
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(101,)))
    gender = rng.integers(0, 2, size=rows)
    age = rng.integers(30, 50, size=rows)
    relationship = _skewed_codes(rng, rows, 13, decay=0.7)
    marital = _skewed_codes(rng, rows, 6, decay=0.75)
    race = _skewed_codes(rng, rows, 9, decay=0.6)
    education = _skewed_codes(rng, rows, len(EDUCATION_LEVELS), decay=0.8)
    hours = rng.integers(35, 45, size=rows)
    noise = rng.integers(0, 60, size=rows)
    salary = 120 + 14 * (age - 30) + 20 * (hours - 35) + 45 * education + noise

    qi_attrs = schema.qi_attributes
    out = []
    for i in range(rows):
        out.append(Row(
            qi=(
                qi_attrs[0].labels[gender[i]],
                int(age[i]),
                qi_attrs[2].labels[relationship[i]],
                qi_attrs[3].labels[marital[i]],
                qi_attrs[4].labels[race[i]],
                qi_attrs[5].labels[education[i]],
                int(hours[i]),
            ),
            sensitive=int(salary[i]),
        ))
    return Table(schema=schema, rows=tuple(out))


def census_like_schema() -> Schema:
    """Eight attributes with the usual census extract domain sizes
    (2/55/13/6/9/10/95/851)."""
    return Schema(
        qi_attributes=(
            AttributeSchema(name="gender", kind=CATEGORICAL, labels=("Male", "Female")),
            AttributeSchema(name="age", kind=CONTINUOUS, lo=17, hi=71),
            AttributeSchema(name="relationship", kind=CATEGORICAL,
                            labels=tuple(f"relationship_{i}" for i in range(13))),
            AttributeSchema(name="marital_status", kind=CATEGORICAL,
                            labels=tuple(f"marital_{i}" for i in range(6))),
            AttributeSchema(name="race", kind=CATEGORICAL,
                            labels=tuple(f"race_{i}" for i in range(9))),
            AttributeSchema(name="education", kind=CATEGORICAL,
                            labels=tuple(f"education_{i}" for i in range(10))),
            AttributeSchema(name="hours_per_week", kind=CONTINUOUS, lo=1, hi=95),
        ),
        sensitive_attribute=AttributeSchema(name="salary", kind=CONTINUOUS, lo=0, hi=850),
    )


def census_like_table(rows: int = 1000, seed: int = 0) -> Table:
    schema = census_like_schema()
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(102,)))
    columns = []
    for attr in schema.qi_attributes:
        if attr.is_continuous:
            columns.append(rng.integers(attr.lo, attr.hi + 1, size=rows))
        else:
            columns.append(_skewed_codes(rng, rows, len(attr.labels), decay=0.75))
    salary = rng.integers(0, 851, size=rows)
    out = []
    for i in range(rows):
        qi = []
        for attr, col in zip(schema.qi_attributes, columns):
            qi.append(int(col[i]) if attr.is_continuous else attr.labels[col[i]])
        out.append(Row(qi=tuple(qi), sensitive=int(salary[i])))
    return Table(schema=schema, rows=tuple(out))
