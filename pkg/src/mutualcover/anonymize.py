"""End-to-end mutual-cover anonymization.

Pipeline: partition the table into l-diverse QI groups, compute one random
output table per (group, QI attribute), replace every QI value with a sample
from its record's distribution, then perturb one QI value of any tuple that
kept all its originals. Output rows stay in input order and the sensitive
column is untouched, so group structure never leaks into published output.

Randomness discipline: the master seed derives one independent substream
per (group, attribute) and per group's unchanged-tuple pass via SeedSequence
spawn keys, so results do not depend on the order groups are processed.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, MutualCoverError
from .partition import DiversityPredicate, Partition, partition_table
from .rot import RandomOutputTable, compute_rot
from .schema import Value
from .table import MODE_OBSERVED, MODE_SPAN, Table, candidate_values, max_distance

logger = logging.getLogger(__name__)

POLICY_PERTURB_ONE = "perturb-one"
POLICY_OFF = "off"

_STREAM_ROT = 0
_STREAM_UNCHANGED = 1


@dataclass(frozen=True)
class AnonymizationConfig:
    delta: float
    l: int
    seed: int
    candidate_mode: str = MODE_SPAN
    unchanged_policy: str = POLICY_PERTURB_ONE

    def __post_init__(self):
        if not (0.0 < self.delta <= 1.0):
            raise ConfigError(f"delta must be in (0, 1], got {self.delta}")
        if self.l < 2:
            raise ConfigError(f"l must be at least 2, got {self.l}")
        if self.delta < 1.0 / self.l - 1e-12:
            raise ConfigError(
                f"delta={self.delta} below 1/l={1.0 / self.l:.6g}; groups of size l could not satisfy it"
            )
        if not (0 <= self.seed < 2 ** 64):
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if self.candidate_mode not in (MODE_OBSERVED, MODE_SPAN):
            raise ConfigError(f"unknown candidate mode {self.candidate_mode!r}")
        if self.unchanged_policy not in (POLICY_PERTURB_ONE, POLICY_OFF):
            raise ConfigError(f"unknown unchanged policy {self.unchanged_policy!r}")


@dataclass(frozen=True)
class Provenance:
    """Run metadata kept out of the publishable table (sidecar only)."""

    delta: float
    l: int
    seed: int
    candidate_mode: str
    unchanged_policy: str
    group_count: int
    group_sizes: tuple[int, ...]
    group_objectives: tuple[float, ...]
    total_objective: float
    perturbed_unchanged: int
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "l": self.l,
            "seed": self.seed,
            "candidate_mode": self.candidate_mode,
            "unchanged_policy": self.unchanged_policy,
            "group_count": self.group_count,
            "group_sizes": list(self.group_sizes),
            "group_objectives": list(self.group_objectives),
            "total_objective": self.total_objective,
            "perturbed_unchanged": self.perturbed_unchanged,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class AnonymizedTable:
    table: Table
    provenance: Provenance

    @property
    def schema(self):
        return self.table.schema

    @property
    def rows(self):
        return self.table.rows


@dataclass(frozen=True, eq=False)
class MutualCoverPlan:
    """Partition plus all rots for one (table, l, delta, candidate mode).

    The expensive LP work depends only on these inputs, never on the seed,
    so one plan can be sampled under many seeds.
    """

    table: Table
    l: int
    delta: float
    candidate_mode: str
    partition: Partition
    rots: tuple[tuple[RandomOutputTable, ...], ...]          # [group][attr]
    group_candidates: tuple[tuple[tuple[Value, ...], ...], ...]
    group_weights: tuple[np.ndarray, ...]

    @property
    def total_objective(self) -> float:
        return float(sum(sum(r.objective_value for r in group) for group in self.rots))


def sample_row(rot: RandomOutputTable, record_index: int, rng: np.random.Generator) -> Value:
    """Draw one replacement value for a record via inverse CDF over the
    stored candidate order. Consumes exactly one uniform variate."""
    row = rot.probabilities[record_index]
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(row), u, side="right"))
    if idx >= row.size:
        idx = row.size - 1
    return rot.candidates[idx]


def attribute_weights(table: Table, row_indices: Sequence[int]) -> np.ndarray:
    """Per-QI-attribute perturbation weight for one group.

    weight = max distance within the group / max distance over the table,
    with 0/0 counted as 0. A group that is constant on an attribute gets
    weight 0, so the unchanged-tuple pass never touches that attribute.
    """
    weights = np.zeros(len(table.schema.qi_attributes))
    for j, attr in enumerate(table.schema.qi_attributes):
        group_range = max_distance(table.qi_values(j, row_indices), attr)
        if group_range == 0.0:
            continue
        table_range = max_distance(table.qi_values(j), attr)
        if table_range == 0.0:
            raise MutualCoverError(
                f"attribute {attr.name!r}: group spread exceeds a zero table spread"
            )
        weights[j] = group_range / table_range
    return weights


def randomize_unchanged(
    current: list[list[Value]],
    originals: Sequence[tuple[Value, ...]],
    weights: np.ndarray,
    candidate_sets: Sequence[Sequence[Value]],
    rng: np.random.Generator,
) -> list[int]:
    """Perturb one QI value of every tuple that still equals its original.

    Attributes are chosen with probability proportional to their weights and
    the replacement is a uniform draw from the group's candidate set; the
    loop repeats until the tuple differs, so the draw itself excludes
    nothing. Returns the local indices that could not be perturbed (all
    weights zero, meaning every candidate set is a singleton).
    """
    total = float(weights.sum())
    skipped: list[int] = []
    cumulative = np.cumsum(weights / total) if total > 0.0 else None
    for i, original in enumerate(originals):
        if tuple(current[i]) != tuple(original):
            continue
        if cumulative is None:
            skipped.append(i)
            continue
        while tuple(current[i]) == tuple(original):
            j = int(np.searchsorted(cumulative, rng.random(), side="right"))
            if j >= weights.size:
                j = weights.size - 1
            options = candidate_sets[j]
            current[i][j] = options[int(rng.integers(len(options)))]
    return skipped


def prepare_plan(
    table: Table,
    l: int,
    delta: float,
    candidate_mode: str = MODE_SPAN,
    principle: DiversityPredicate | None = None,
) -> MutualCoverPlan:
    """Partition the table and solve every (group, attribute) rot LP."""
    part = partition_table(table, l, principle=principle)
    schema = table.schema
    rots: list[tuple[RandomOutputTable, ...]] = []
    cands_all: list[tuple[tuple[Value, ...], ...]] = []
    weights_all: list[np.ndarray] = []
    for group in part.groups:
        indices = list(group.row_indices)
        group_rots = []
        group_cands = []
        for j, attr in enumerate(schema.qi_attributes):
            values = table.qi_values(j, indices)
            mode = candidate_mode if attr.is_continuous else MODE_OBSERVED
            cands = candidate_values(values, attr, mode)
            rot = compute_rot(values, attr, delta, candidates=cands, row_indices=indices)
            group_rots.append(rot)
            group_cands.append(tuple(cands))
        rots.append(tuple(group_rots))
        cands_all.append(tuple(group_cands))
        weights_all.append(attribute_weights(table, indices))
    return MutualCoverPlan(
        table=table,
        l=l,
        delta=delta,
        candidate_mode=candidate_mode,
        partition=part,
        rots=tuple(rots),
        group_candidates=tuple(cands_all),
        group_weights=tuple(weights_all),
    )


def sample_plan(
    plan: MutualCoverPlan,
    seed: int,
    unchanged_policy: str = POLICY_PERTURB_ONE,
) -> AnonymizedTable:
    """Draw one anonymized table from a prepared plan under a master seed."""
    table = plan.table
    new_qi: list[list[Value] | None] = [None] * len(table)
    warnings: list[str] = []
    perturbed = 0

    for g, group in enumerate(plan.partition.groups):
        indices = list(group.row_indices)
        originals = [table.rows[i].qi for i in indices]
        sampled = [list(q) for q in originals]
        for j in range(len(table.schema.qi_attributes)):
            rot = plan.rots[g][j]
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAM_ROT, g, j)))
            for local in range(len(indices)):
                sampled[local][j] = sample_row(rot, local, rng)
        if unchanged_policy == POLICY_PERTURB_ONE:
            before = [tuple(row) for row in sampled]
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAM_UNCHANGED, g)))
            skipped = randomize_unchanged(sampled, originals, plan.group_weights[g],
                                          plan.group_candidates[g], rng)
            perturbed += sum(
                1 for local, row in enumerate(sampled)
                if before[local] == originals[local] and tuple(row) != originals[local]
            )
            for local in skipped:
                message = (
                    f"group {g}: row {indices[local]} kept all original QI values and "
                    "cannot be perturbed (every candidate set is a singleton)"
                )
                warnings.append(message)
                logger.warning(message)
        for local, i in enumerate(indices):
            new_qi[i] = sampled[local]

    published = table.replace_qi([q for q in new_qi])
    provenance = Provenance(
        delta=plan.delta,
        l=plan.l,
        seed=seed,
        candidate_mode=plan.candidate_mode,
        unchanged_policy=unchanged_policy,
        group_count=len(plan.partition.groups),
        group_sizes=tuple(len(grp) for grp in plan.partition.groups),
        group_objectives=tuple(
            float(sum(r.objective_value for r in group)) for group in plan.rots
        ),
        total_objective=plan.total_objective,
        perturbed_unchanged=perturbed,
        warnings=tuple(warnings),
    )
    return AnonymizedTable(table=published, provenance=provenance)


def mutual_cover(
    table: Table,
    config: AnonymizationConfig,
    principle: DiversityPredicate | None = None,
) -> AnonymizedTable:
    """Anonymize a table end to end under one configuration."""
    plan = prepare_plan(table, config.l, config.delta, config.candidate_mode, principle)
    return sample_plan(plan, config.seed, config.unchanged_policy)
