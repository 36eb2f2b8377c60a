"""Reproducible experiment grids over anonymization schemes.

Each grid runs the anonymizer (or a baseline) across its parameter values,
repeats randomized runs under seeds derived from a master seed (master +
repetition index), and reports max, min, and average per configuration.
Results come back as tidy rows (one dict per configuration and statistic
group) ready for CSV serialization, plus a JSON-able summary echoing the
configuration and seeds.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .anonymize import POLICY_PERTURB_ONE, prepare_plan, sample_plan
from .baselines import anatomy_bucketize, mondrian_generalize
from .evaluation import (
    QueryWorkload,
    disclosure_simulation,
    evaluate_query,
    generalization_iloss,
    generate_workload,
    iloss,
)
from .table import MODE_SPAN, Table

SCHEME_MUTUAL_COVER = "mutualcover"
SCHEME_MONDRIAN = "mondrian"
SCHEME_ANATOMY = "anatomy"

DEFAULT_DELTAS = (1 / 5, 1 / 6, 1 / 7, 1 / 8, 1 / 10)
DEFAULT_P_MATCHES = (0.3, 0.5, 0.7, 0.8, 0.9, 1.0)
DEFAULT_L_SWEEP = (10, 12, 15, 18, 20)


def derive_seeds(master_seed: int, repetitions: int) -> list[int]:
    return [master_seed + r for r in range(repetitions)]


def _stats(values: Sequence[float]) -> dict:
    return {
        "max": float(max(values)),
        "min": float(min(values)),
        "avg": float(sum(values) / len(values)),
    }


@dataclass
class ExperimentReport:
    rows: list[dict] = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def write(self, report_dir: str | Path, name: str) -> tuple[Path, Path]:
        directory = Path(report_dir)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{name}.csv"
        json_path = directory / f"{name}.json"
        if self.rows:
            fields = list(self.rows[0].keys())
            with csv_path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.DictWriter(handle, fieldnames=fields)
                writer.writeheader()
                writer.writerows(self.rows)
        else:
            csv_path.write_text("", encoding="utf-8")
        json_path.write_text(json.dumps(self.summary, indent=2) + "\n", encoding="utf-8")
        return csv_path, json_path


def disclosure_grid(
    table: Table,
    l: int,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    p_matches: Sequence[float] = DEFAULT_P_MATCHES,
    repetitions: int = 10,
    trials: int = 20,
    seed: int = 0,
    candidate_mode: str = MODE_SPAN,
    include_mondrian: bool = True,
) -> ExperimentReport:
    """Identity/attribute disclosure for mutual cover across the delta and
    p_match grids, with the generalization baseline alongside."""
    report = ExperimentReport(summary={
        "experiment": "disclosure",
        "l": l,
        "deltas": list(deltas),
        "p_matches": list(p_matches),
        "repetitions": repetitions,
        "trials": trials,
        "seed": seed,
        "seeds": derive_seeds(seed, repetitions),
    })
    seeds = derive_seeds(seed, repetitions)
    for delta in deltas:
        plan = prepare_plan(table, l, delta, candidate_mode)
        outputs = [sample_plan(plan, s, POLICY_PERTURB_ONE) for s in seeds]
        for p_match in p_matches:
            identity = []
            attribute = []
            for rep, out in enumerate(outputs):
                result = disclosure_simulation(table, out, p_match, trials=trials,
                                               seed=seeds[rep])
                identity.append(result.identity_probability)
                attribute.append(result.attribute_probability)
            for metric, values in (("identity", identity), ("attribute", attribute)):
                report.rows.append({
                    "scheme": SCHEME_MUTUAL_COVER,
                    "delta": delta,
                    "l": l,
                    "p_match": p_match,
                    "metric": metric,
                    **_stats(values),
                })
    if include_mondrian:
        generalized = mondrian_generalize(table, l)
        for p_match in p_matches:
            identity = []
            attribute = []
            for rep in range(repetitions):
                result = disclosure_simulation(table, generalized, p_match,
                                               trials=trials, seed=seeds[rep])
                identity.append(result.identity_probability)
                attribute.append(result.attribute_probability)
            for metric, values in (("identity", identity), ("attribute", attribute)):
                report.rows.append({
                    "scheme": SCHEME_MONDRIAN,
                    "delta": "",
                    "l": l,
                    "p_match": p_match,
                    "metric": metric,
                    **_stats(values),
                })
    return report


def iloss_grid(
    table: Table,
    l: int,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    repetitions: int = 10,
    seed: int = 0,
    candidate_mode: str = MODE_SPAN,
    include_mondrian: bool = True,
) -> ExperimentReport:
    """Information loss across deltas, with the generalization baseline."""
    report = ExperimentReport(summary={
        "experiment": "iloss",
        "l": l,
        "deltas": list(deltas),
        "repetitions": repetitions,
        "seed": seed,
        "seeds": derive_seeds(seed, repetitions),
    })
    seeds = derive_seeds(seed, repetitions)
    for delta in deltas:
        plan = prepare_plan(table, l, delta, candidate_mode)
        losses = [iloss(table, sample_plan(plan, s, POLICY_PERTURB_ONE)) for s in seeds]
        report.rows.append({
            "scheme": SCHEME_MUTUAL_COVER, "delta": delta, "l": l,
            "metric": "iloss", **_stats(losses),
        })
    if include_mondrian:
        loss = generalization_iloss(mondrian_generalize(table, l))
        report.rows.append({
            "scheme": SCHEME_MONDRIAN, "delta": "", "l": l,
            "metric": "iloss", **_stats([loss]),
        })
    return report


def _workload_errors(workload: QueryWorkload, table: Table, published) -> tuple[list[float], list[float]]:
    interval = []
    point = []
    for query in workload.queries:
        result = evaluate_query(query, table, published)
        interval.append(result.interval_error)
        if result.point_error is not None:
            point.append(result.point_error)
    return interval, point


def query_grid(
    table: Table,
    l: int,
    deltas: Sequence[float] = DEFAULT_DELTAS,
    repetitions: int = 10,
    queries: int = 1000,
    seed: int = 0,
    candidate_mode: str = MODE_SPAN,
    include_baselines: bool = True,
) -> ExperimentReport:
    """SUM-query error across deltas plus the two baselines.

    Mutual cover reports the point error (its interval form is zero by
    construction); generalization and bucketization report the interval
    form. Both are included in the rows for transparency."""
    workload = generate_workload(table.schema, queries, seed=seed, table=table)
    report = ExperimentReport(summary={
        "experiment": "query",
        "l": l,
        "deltas": list(deltas),
        "repetitions": repetitions,
        "queries": queries,
        "seed": seed,
        "seeds": derive_seeds(seed, repetitions),
    })
    seeds = derive_seeds(seed, repetitions)
    for delta in deltas:
        plan = prepare_plan(table, l, delta, candidate_mode)
        interval_means = []
        point_means = []
        for s in seeds:
            out = sample_plan(plan, s, POLICY_PERTURB_ONE)
            interval, point = _workload_errors(workload, table, out)
            interval_means.append(float(np.mean(interval)))
            point_means.append(float(np.mean(point)))
        report.rows.append({
            "scheme": SCHEME_MUTUAL_COVER, "delta": delta, "l": l,
            "metric": "point_error", **_stats(point_means),
        })
        report.rows.append({
            "scheme": SCHEME_MUTUAL_COVER, "delta": delta, "l": l,
            "metric": "interval_error", **_stats(interval_means),
        })
    if include_baselines:
        generalized = mondrian_generalize(table, l)
        interval, _ = _workload_errors(workload, table, generalized)
        report.rows.append({
            "scheme": SCHEME_MONDRIAN, "delta": "", "l": l,
            "metric": "interval_error", **_stats([float(np.mean(interval))]),
        })
        buckets_errors = []
        for s in seeds:
            buckets = anatomy_bucketize(table, l, seed=s)
            interval, _ = _workload_errors(workload, table, buckets)
            buckets_errors.append(float(np.mean(interval)))
        report.rows.append({
            "scheme": SCHEME_ANATOMY, "delta": "", "l": l,
            "metric": "interval_error", **_stats(buckets_errors),
        })
    return report


def l_sweep(
    table: Table,
    delta: float = 1 / 6,
    l_values: Sequence[int] = DEFAULT_L_SWEEP,
    repetitions: int = 10,
    queries: int = 1000,
    seed: int = 0,
    candidate_mode: str = MODE_SPAN,
) -> ExperimentReport:
    """Information loss and query error as the diversity parameter grows."""
    workload = generate_workload(table.schema, queries, seed=seed, table=table)
    report = ExperimentReport(summary={
        "experiment": "l_sweep",
        "delta": delta,
        "l_values": list(l_values),
        "repetitions": repetitions,
        "queries": queries,
        "seed": seed,
        "seeds": derive_seeds(seed, repetitions),
    })
    seeds = derive_seeds(seed, repetitions)
    for l in l_values:
        plan = prepare_plan(table, l, delta, candidate_mode)
        losses = []
        point_means = []
        for s in seeds:
            out = sample_plan(plan, s, POLICY_PERTURB_ONE)
            losses.append(iloss(table, out))
            _, point = _workload_errors(workload, table, out)
            point_means.append(float(np.mean(point)))
        report.rows.append({
            "scheme": SCHEME_MUTUAL_COVER, "delta": delta, "l": l,
            "metric": "iloss", **_stats(losses),
        })
        report.rows.append({
            "scheme": SCHEME_MUTUAL_COVER, "delta": delta, "l": l,
            "metric": "point_error", **_stats(point_means),
        })
    return report
