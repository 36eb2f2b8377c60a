from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from mutualcover.errors import InfeasiblePartitionError
from mutualcover.partition import (
    Partition,
    QIGroup,
    choose_attribute,
    is_l_diverse,
    median_value,
    partition_table,
    whole_table_ranges,
)
from mutualcover.schema import CATEGORICAL, CONTINUOUS, AttributeSchema, Schema

from .conftest import make_table, random_table


def brute_force_l_diverse(sensitive_values, l) -> bool:
    """Definition checked verbatim: every value's proportion <= 1/l."""
    if not sensitive_values:
        return False
    counts = Counter(sensitive_values)
    return all(c / len(sensitive_values) <= 1.0 / l + 1e-12 for c in counts.values())


class TestIsLDiverse:
    def test_boundary_equality(self):
        assert is_l_diverse(["a", "b", "a", "b"], 2) is True

    def test_majority_violates(self):
        assert is_l_diverse(["a", "a", "b"], 2) is False

    def test_l_one_always_true_nonempty(self):
        assert is_l_diverse(["a", "a", "a"], 1) is True

    def test_empty_is_false(self):
        assert is_l_diverse([], 2) is False

    def test_matches_brute_force_on_random_multisets(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            values = [int(v) for v in rng.integers(0, 6, size=rng.integers(1, 25))]
            l = int(rng.integers(1, 8))
            assert is_l_diverse(values, l) == brute_force_l_diverse(values, l)


class TestMedianValue:
    def test_lower_median_even(self, age_attr):
        assert median_value([1, 2, 3, 4], age_attr) == 2

    def test_singleton(self, age_attr):
        assert median_value([7], age_attr) == 7

    def test_duplicates(self, age_attr):
        assert median_value([5, 5, 9], age_attr) == 5

    def test_categorical_uses_label_order(self):
        attr = AttributeSchema(name="x", kind=CATEGORICAL, labels=("low", "mid", "high"))
        assert median_value(["high", "low", "mid", "high"], attr) == "mid"

    def test_matches_sort_and_index_oracle(self, age_attr):
        rng = np.random.default_rng(3)
        for _ in range(200):
            values = [int(v) for v in rng.integers(0, 50, size=rng.integers(1, 20))]
            expected = sorted(values)[(len(values) - 1) // 2]
            assert median_value(values, age_attr) == expected


class TestChooseAttribute:
    def _schema(self):
        # gender gets a pairwise matrix so its normalized range can be fractional
        return Schema(
            qi_attributes=(
                AttributeSchema(name="age", kind=CONTINUOUS, lo=0, hi=10),
                AttributeSchema(name="grade", kind=CATEGORICAL, labels=("a", "b", "c"),
                                distance_matrix=((0, 0.5, 1.0), (0.5, 0, 0.5), (1.0, 0.5, 0))),
            ),
            sensitive_attribute=AttributeSchema(name="s", kind=CONTINUOUS, lo=0, hi=9),
        )

    def test_singleton_candidate(self):
        schema = self._schema()
        table = make_table(schema, [(0, "a", 0), (10, "c", 1)])
        indices = np.array([0, 1])
        only = schema.qi_attributes[1]
        assert choose_attribute(table, indices, [only]) is only

    def test_widest_normalized_range_wins(self):
        # age spans 9 of table range 10 (0.9); grade spans 0.5 of 1.0 in-group
        schema = self._schema()
        table = make_table(schema, [
            (0, "a", 0), (9, "b", 1), (10, "c", 2), (2, "a", 3),
        ])
        group = np.array([0, 1, 3])      # ages {0, 9, 2} range 9; grades {a, b} range 0.5
        ranges = whole_table_ranges(table)
        assert ranges["age"] == 10.0 and ranges["grade"] == 1.0
        chosen = choose_attribute(table, group, list(schema.qi_attributes), ranges)
        assert chosen.name == "age"

    def test_tie_breaks_to_schema_order(self):
        schema = Schema(
            qi_attributes=(
                AttributeSchema(name="a1", kind=CONTINUOUS, lo=0, hi=10),
                AttributeSchema(name="a2", kind=CONTINUOUS, lo=0, hi=10),
            ),
            sensitive_attribute=AttributeSchema(name="s", kind=CONTINUOUS, lo=0, hi=9),
        )
        table = make_table(schema, [(0, 0, 0), (10, 10, 1)])
        chosen = choose_attribute(table, np.array([0, 1]), list(schema.qi_attributes))
        assert chosen.name == "a1"


class TestPartitionTable:
    def test_degenerate_attribute_single_group(self):
        schema = Schema(
            qi_attributes=(AttributeSchema(name="age", kind=CONTINUOUS, lo=0, hi=10),),
            sensitive_attribute=AttributeSchema(name="s", kind=CATEGORICAL, labels=("a", "b")),
        )
        table = make_table(schema, [(5, "a"), (5, "b"), (5, "a"), (5, "b")])
        part = partition_table(table, 2)
        assert len(part.groups) == 1
        assert len(part.groups[0]) == 4

    def test_eight_row_alternating(self):
        schema = Schema(
            qi_attributes=(AttributeSchema(name="age", kind=CONTINUOUS, lo=0, hi=10),),
            sensitive_attribute=AttributeSchema(name="s", kind=CATEGORICAL, labels=("a", "b")),
        )
        rows = [(i + 1, "ab"[i % 2]) for i in range(8)]
        table = make_table(schema, rows)
        part = partition_table(table, 2)
        assert sorted(i for g in part.groups for i in g.row_indices) == list(range(8))
        for group in part.groups:
            values = [table.rows[i].sensitive for i in group.row_indices]
            assert len(group) >= 2
            assert brute_force_l_diverse(values, 2)

    def test_group_size_at_least_l(self):
        rng = np.random.default_rng(11)
        table = random_table(rng, n_rows=120, n_sensitive=30)
        part = partition_table(table, 10)
        assert all(len(g) >= 10 for g in part.groups)

    def test_root_infeasibility_rejected(self):
        schema = Schema(
            qi_attributes=(AttributeSchema(name="age", kind=CONTINUOUS, lo=0, hi=10),),
            sensitive_attribute=AttributeSchema(name="s", kind=CATEGORICAL, labels=("a", "b")),
        )
        table = make_table(schema, [(1, "a"), (2, "a"), (3, "b")])
        with pytest.raises(InfeasiblePartitionError):
            partition_table(table, 2)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        table = random_table(rng, n_rows=80, n_sensitive=12)
        p1 = partition_table(table, 4)
        p2 = partition_table(table, 4)
        assert p1.groups == p2.groups

    def test_custom_principle_hook(self):
        # all-distinct principle: stricter than proportion-based diversity
        schema = Schema(
            qi_attributes=(AttributeSchema(name="age", kind=CONTINUOUS, lo=0, hi=63),),
            sensitive_attribute=AttributeSchema(name="s", kind=CONTINUOUS, lo=0, hi=63),
        )
        rng = np.random.default_rng(9)
        ages = rng.integers(0, 64, size=40)
        table = make_table(schema, [(int(a), int(s)) for a, s in zip(ages, range(40))])
        hook = lambda values: len(values) > 0 and len(set(values)) == len(values)
        part = partition_table(table, 2, principle=hook)
        assert len(part.groups) > 1
        for group in part.groups:
            values = table.sensitive_values(list(group.row_indices))
            assert len(set(values)) == len(values)

    def test_fuzz_cover_disjoint_diverse(self):
        rng = np.random.default_rng(1234)
        for _ in range(120):
            n = int(rng.integers(4, 60))
            table = random_table(rng, n_rows=n, n_sensitive=int(rng.integers(2, 10)))
            l = int(rng.integers(1, 5))
            values = table.sensitive_values()
            if not brute_force_l_diverse(values, l):
                with pytest.raises(InfeasiblePartitionError):
                    partition_table(table, l)
                continue
            part = partition_table(table, l)
            covered = sorted(i for g in part.groups for i in g.row_indices)
            assert covered == list(range(n))
            for group in part.groups:
                assert brute_force_l_diverse(
                    table.sensitive_values(list(group.row_indices)), l)
                assert len(group) >= l


class TestPartitionInvariants:
    def test_overlapping_groups_rejected(self):
        with pytest.raises(ValueError):
            Partition(groups=(QIGroup((0, 1)), QIGroup((1, 2))), row_count=3)

    def test_gap_rejected(self):
        with pytest.raises(ValueError):
            Partition(groups=(QIGroup((0, 1)),), row_count=3)

    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            QIGroup(())
