"""Mutual-cover anonymization for microdata publishing.

Replaces quasi-identifier values with samples from per-group random output
tables computed by linear programming, so that similar records cover for
each other under a delta-probability bound. Includes an l-diverse Mondrian
partitioner, generalization and bucketization baselines, and an evaluation
harness for disclosure risk, information loss, and aggregate-query accuracy.
"""
from .anonymize import (
    AnonymizationConfig,
    AnonymizedTable,
    attribute_weights,
    mutual_cover,
    randomize_unchanged,
    sample_row,
)
from .baselines import (
    BucketizedTables,
    GeneralizedTable,
    anatomy_bucketize,
    mondrian_generalize,
)
from .errors import (
    ConfigError,
    DataError,
    InfeasiblePartitionError,
    LpError,
    MutualCoverError,
    SchemaError,
)
from .evaluation import (
    DisclosureReport,
    Query,
    QueryError,
    QueryWorkload,
    disclosure_simulation,
    evaluate_query,
    exact_reid_case_probs,
    exact_reid_probability,
    generate_workload,
    generalization_iloss,
    iloss,
    relative_error,
    value_reid_probability,
)
from .lp import LinearProgram, LpSolution, solve_lp
from .partition import Partition, QIGroup, is_l_diverse, median_value, partition_table
from .rot import (
    RandomOutputTable,
    build_rot_lp,
    compute_rot,
    min_column_support,
    verify_delta_probability,
)
from .schema import AttributeSchema, Schema, Value, distance, load_schema, save_schema
from .table import Row, Table, candidate_values, load_table, max_distance, write_table_csv

__version__ = "0.1.0"

__all__ = [
    "AnonymizationConfig",
    "AnonymizedTable",
    "AttributeSchema",
    "BucketizedTables",
    "ConfigError",
    "DataError",
    "DisclosureReport",
    "GeneralizedTable",
    "InfeasiblePartitionError",
    "LinearProgram",
    "LpError",
    "LpSolution",
    "MutualCoverError",
    "Partition",
    "QIGroup",
    "Query",
    "QueryError",
    "QueryWorkload",
    "RandomOutputTable",
    "Row",
    "Schema",
    "SchemaError",
    "Table",
    "Value",
    "anatomy_bucketize",
    "attribute_weights",
    "build_rot_lp",
    "candidate_values",
    "compute_rot",
    "disclosure_simulation",
    "distance",
    "evaluate_query",
    "exact_reid_case_probs",
    "exact_reid_probability",
    "generate_workload",
    "generalization_iloss",
    "iloss",
    "is_l_diverse",
    "load_schema",
    "load_table",
    "max_distance",
    "median_value",
    "min_column_support",
    "mondrian_generalize",
    "mutual_cover",
    "partition_table",
    "randomize_unchanged",
    "relative_error",
    "sample_row",
    "save_schema",
    "solve_lp",
    "value_reid_probability",
    "verify_delta_probability",
    "write_table_csv",
]
