"""Command-line interface: anonymize, baseline, evaluate, workload.

Every command is deterministic given identical inputs and seed; grids can
be driven from flags or from a JSON config file (flags win). Exit status is
0 only when all outputs were written and runtime invariant checks passed.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict
from pathlib import Path

from . import experiments
from .anonymize import (
    POLICY_OFF,
    POLICY_PERTURB_ONE,
    AnonymizationConfig,
    mutual_cover,
    prepare_plan,
    sample_plan,
)
from .baselines import anatomy_bucketize, format_region, mondrian_generalize
from .errors import ConfigError, MutualCoverError
from .evaluation import Predicate, disclosure_simulation, evaluate_query, generate_workload, iloss
from .rot import rot_to_csv
from .schema import load_schema
from .table import MODE_OBSERVED, MODE_SPAN, load_table, write_table_csv


def _parse_fraction(text: str) -> float:
    if "/" in text:
        num, den = text.split("/", 1)
        return float(num) / float(den)
    return float(text)


def _parse_list(text: str, cast):
    return [cast(part) for part in text.split(",") if part.strip()]


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _merged(args: argparse.Namespace, key: str, default=None):
    value = getattr(args, key, None)
    if value is not None:
        return value
    return args.config_data.get(key, default)


def cmd_anonymize(args: argparse.Namespace) -> int:
    schema = load_schema(args.schema)
    table = load_table(args.input, schema)
    config = AnonymizationConfig(
        delta=_parse_fraction(args.delta),
        l=args.l,
        seed=args.seed,
        candidate_mode=args.candidate_mode,
        unchanged_policy=POLICY_OFF if args.no_perturb_unchanged else POLICY_PERTURB_ONE,
    )
    if args.dump_rot_dir:
        plan = prepare_plan(table, config.l, config.delta, config.candidate_mode)
        rot_dir = Path(args.dump_rot_dir)
        rot_dir.mkdir(parents=True, exist_ok=True)
        for g, group_rots in enumerate(plan.rots):
            for rot in group_rots:
                path = rot_dir / f"group{g:04d}_{rot.attribute}.csv"
                path.write_text(rot_to_csv(rot), encoding="utf-8")
        out = sample_plan(plan, config.seed, config.unchanged_policy)
    else:
        out = mutual_cover(table, config)
    write_table_csv(out.table, args.output)
    sidecar = Path(args.output).with_suffix(Path(args.output).suffix + ".provenance.json")
    sidecar.write_text(json.dumps(out.provenance.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(f"groups: {out.provenance.group_count}")
    print(f"total LP objective: {out.provenance.total_objective:.6f}")
    print(f"wrote {args.output} and {sidecar.name}")
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    schema = load_schema(args.schema)
    table = load_table(args.input, schema)
    if args.method == "mondrian":
        generalized = mondrian_generalize(table, args.l)
        with Path(args.output).open("w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerow(schema.column_names)
            owner = generalized.group_of_row
            for i in range(len(table)):
                regions = generalized.group_regions[owner[i]]
                cells = []
                for j, attr in enumerate(schema.qi_attributes):
                    labels = attr.labels if attr.labels else None
                    cells.append(format_region(regions[j], labels))
                cells.append(table.rows[i].sensitive)
                writer.writerow(cells)
        print(f"groups: {len(generalized.partition.groups)}")
        print(f"wrote {args.output}")
        return 0
    buckets = anatomy_bucketize(table, args.l, seed=args.seed)
    prefix = Path(args.output)
    qi_path = prefix.with_suffix(".qi.csv")
    sens_path = prefix.with_suffix(".sensitive.csv")
    with qi_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(schema.qi_names) + ["bucket_id"])
        for i, row in enumerate(table.rows):
            writer.writerow(list(row.qi) + [buckets.bucket_of_row[i]])
    with sens_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["bucket_id", schema.sensitive_attribute.name, "count"])
        writer.writerows(buckets.sensitive_counts())
    print(f"buckets: {buckets.num_buckets}")
    print(f"wrote {qi_path} and {sens_path}")
    return 0


def cmd_workload(args: argparse.Namespace) -> int:
    schema = load_schema(args.schema)
    table = load_table(args.input, schema) if args.input else None
    workload = generate_workload(schema, args.queries, seed=args.seed, table=table)
    payload = {
        "seed": workload.seed,
        "queries": [
            [asdict(p) for p in query.predicates]
            for query in workload.queries
        ],
    }
    Path(args.output).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {args.output} ({len(workload.queries)} queries)")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    schema = load_schema(args.schema)
    table = load_table(args.input, schema)
    metrics = _parse_list(_merged(args, "metrics", "disclosure,iloss,query"), str)
    deltas = [(_parse_fraction(x) if isinstance(x, str) else float(x))
              for x in _parse_list(_merged(args, "deltas", "1/5,1/6,1/7,1/8,1/10"), str)]
    p_matches = [float(x) for x in _parse_list(_merged(args, "p_match", "0.3,0.5,0.7,0.8,0.9,1.0"), str)]
    l = int(_merged(args, "l", 10))
    repetitions = int(_merged(args, "repetitions", 10))
    trials = int(_merged(args, "trials", 20))
    queries = int(_merged(args, "queries", 1000))
    seed = int(_merged(args, "seed", 0))
    report_dir = _merged(args, "report_dir", "reports")
    candidate_mode = _merged(args, "candidate_mode", MODE_SPAN)

    written = []
    if "disclosure" in metrics:
        report = experiments.disclosure_grid(
            table, l, deltas=deltas, p_matches=p_matches,
            repetitions=repetitions, trials=trials, seed=seed,
            candidate_mode=candidate_mode)
        written += report.write(report_dir, "disclosure")
    if "iloss" in metrics:
        report = experiments.iloss_grid(
            table, l, deltas=deltas, repetitions=repetitions, seed=seed,
            candidate_mode=candidate_mode)
        written += report.write(report_dir, "iloss")
    if "query" in metrics:
        report = experiments.query_grid(
            table, l, deltas=deltas, repetitions=repetitions, queries=queries,
            seed=seed, candidate_mode=candidate_mode)
        written += report.write(report_dir, "query")
    if "l-sweep" in metrics:
        l_values = [int(x) for x in _parse_list(_merged(args, "l_sweep", "10,12,15,18,20"), str)]
        delta = deltas[0] if len(deltas) == 1 else 1 / 6
        report = experiments.l_sweep(
            table, delta=delta, l_values=l_values, repetitions=repetitions,
            queries=queries, seed=seed, candidate_mode=candidate_mode)
        written += report.write(report_dir, "l_sweep")
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mutualcover",
        description="Mutual-cover anonymization, baselines, and evaluation harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    anonymize = sub.add_parser("anonymize", help="anonymize a CSV")
    anonymize.add_argument("--input", required=True)
    anonymize.add_argument("--schema", required=True)
    anonymize.add_argument("--output", required=True)
    anonymize.add_argument("--delta", required=True, help="e.g. 0.1 or 1/10")
    anonymize.add_argument("--l", type=int, required=True)
    anonymize.add_argument("--seed", type=int, default=0)
    anonymize.add_argument("--candidate-mode", dest="candidate_mode",
                           choices=[MODE_OBSERVED, MODE_SPAN], default=MODE_SPAN)
    anonymize.add_argument("--no-perturb-unchanged", action="store_true")
    anonymize.add_argument("--dump-rot-dir", dest="dump_rot_dir", default=None,
                           help="debug only: write every rot as CSV into this directory")
    anonymize.set_defaults(func=cmd_anonymize)

    baseline = sub.add_parser("baseline", help="run a baseline scheme")
    baseline.add_argument("method", choices=["mondrian", "anatomy"])
    baseline.add_argument("--input", required=True)
    baseline.add_argument("--schema", required=True)
    baseline.add_argument("--output", required=True,
                          help="CSV path (mondrian) or prefix (anatomy)")
    baseline.add_argument("--l", type=int, required=True)
    baseline.add_argument("--seed", type=int, default=0)
    baseline.set_defaults(func=cmd_baseline)

    workload = sub.add_parser("workload", help="generate a SUM-query workload")
    workload.add_argument("--schema", required=True)
    workload.add_argument("--queries", type=int, default=1000)
    workload.add_argument("--seed", type=int, default=0)
    workload.add_argument("--output", required=True)
    workload.add_argument("--input", default=None,
                          help="optional CSV; queries with zero actual sum are redrawn")
    workload.set_defaults(func=cmd_workload)

    evaluate = sub.add_parser("evaluate", help="run experiment grids")
    evaluate.add_argument("--input", required=True)
    evaluate.add_argument("--schema", required=True)
    evaluate.add_argument("--config", default=None, help="JSON config file; flags win")
    evaluate.add_argument("--metrics", default=None,
                          help="comma list from disclosure,iloss,query,l-sweep")
    evaluate.add_argument("--deltas", default=None, help="e.g. 1/5,1/6,1/10")
    evaluate.add_argument("--p-match", dest="p_match", default=None)
    evaluate.add_argument("--l", type=int, default=None)
    evaluate.add_argument("--l-sweep", dest="l_sweep", default=None)
    evaluate.add_argument("--repetitions", type=int, default=None)
    evaluate.add_argument("--trials", type=int, default=None)
    evaluate.add_argument("--queries", type=int, default=None)
    evaluate.add_argument("--seed", type=int, default=None)
    evaluate.add_argument("--candidate-mode", dest="candidate_mode",
                          choices=[MODE_OBSERVED, MODE_SPAN], default=None)
    evaluate.add_argument("--report-dir", dest="report_dir", default=None)
    evaluate.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.config_data = _load_config_file(getattr(args, "config", None))
    try:
        return args.func(args)
    except MutualCoverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
