from __future__ import annotations

import csv
import json
from pathlib import Path

import pytest

from mutualcover.cli import main
from mutualcover.datasets import synthetic_table
from mutualcover.schema import save_schema
from mutualcover.table import write_table_csv


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    table = synthetic_table(rows=160, seed=5)
    data = root / "data.csv"
    schema = root / "schema.json"
    write_table_csv(table, data)
    save_schema(table.schema, schema)
    return root, data, schema, table


class TestAnonymizeCommand:
    def test_writes_output_and_sidecar(self, workspace, capsys):
        root, data, schema, table = workspace
        out = root / "anon.csv"
        status = main([
            "anonymize", "--input", str(data), "--schema", str(schema),
            "--output", str(out), "--delta", "1/6", "--l", "6", "--seed", "7",
        ])
        assert status == 0
        printed = capsys.readouterr().out
        assert "groups:" in printed and "total LP objective:" in printed
        with out.open() as handle:
            rows = list(csv.reader(handle))
        assert len(rows) == len(table) + 1
        sensitive = [r[-1] for r in rows[1:]]
        assert sensitive == [str(row.sensitive) for row in table.rows]
        sidecar = json.loads((root / "anon.csv.provenance.json").read_text())
        assert sidecar["l"] == 6
        assert sidecar["seed"] == 7
        assert sidecar["group_count"] >= 1

    def test_rejects_delta_below_one_over_l(self, workspace, capsys):
        root, data, schema, _ = workspace
        status = main([
            "anonymize", "--input", str(data), "--schema", str(schema),
            "--output", str(root / "x.csv"), "--delta", "0.05", "--l", "10",
        ])
        assert status == 1
        assert "error:" in capsys.readouterr().err

    def test_same_seed_same_output(self, workspace):
        root, data, schema, _ = workspace
        a = root / "a.csv"
        b = root / "b.csv"
        for out in (a, b):
            assert main([
                "anonymize", "--input", str(data), "--schema", str(schema),
                "--output", str(out), "--delta", "1/6", "--l", "6", "--seed", "3",
            ]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_rot_debug_dump(self, workspace):
        root, data, schema, _ = workspace
        rot_dir = root / "rots"
        assert main([
            "anonymize", "--input", str(data), "--schema", str(schema),
            "--output", str(root / "c.csv"), "--delta", "1/3", "--l", "3",
            "--seed", "1", "--dump-rot-dir", str(rot_dir),
        ]) == 0
        dumps = list(rot_dir.glob("group*_*.csv"))
        assert dumps
        header = dumps[0].read_text().splitlines()[0]
        assert header.startswith("record,")


class TestBaselineCommand:
    def test_mondrian_csv(self, workspace):
        root, data, schema, table = workspace
        out = root / "mondrian.csv"
        assert main([
            "baseline", "mondrian", "--input", str(data), "--schema", str(schema),
            "--output", str(out), "--l", "6",
        ]) == 0
        with out.open() as handle:
            rows = list(csv.reader(handle))
        assert len(rows) == len(table) + 1
        age_column = rows[0].index("age")
        assert "-" in rows[1][age_column]

    def test_anatomy_two_files(self, workspace):
        root, data, schema, table = workspace
        prefix = root / "anatomy"
        assert main([
            "baseline", "anatomy", "--input", str(data), "--schema", str(schema),
            "--output", str(prefix), "--l", "6", "--seed", "3",
        ]) == 0
        qi_rows = list(csv.reader((root / "anatomy.qi.csv").open()))
        sens_rows = list(csv.reader((root / "anatomy.sensitive.csv").open()))
        assert qi_rows[0][-1] == "bucket_id"
        assert sens_rows[0] == ["bucket_id", "salary", "count"]
        assert len(qi_rows) == len(table) + 1
        total = sum(int(r[-1]) for r in sens_rows[1:])
        assert total == len(table)


class TestWorkloadCommand:
    def test_writes_queries(self, workspace):
        root, data, schema, _ = workspace
        out = root / "workload.json"
        assert main([
            "workload", "--schema", str(schema), "--queries", "25",
            "--seed", "9", "--output", str(out), "--input", str(data),
        ]) == 0
        payload = json.loads(out.read_text())
        assert payload["seed"] == 9
        assert len(payload["queries"]) == 25
        for predicates in payload["queries"]:
            assert len(predicates) == 4


class TestEvaluateCommand:
    def test_small_grid_writes_reports(self, workspace):
        root, data, schema, _ = workspace
        report_dir = root / "reports"
        assert main([
            "evaluate", "--input", str(data), "--schema", str(schema),
            "--metrics", "iloss,query", "--deltas", "1/3,1/2", "--l", "3",
            "--repetitions", "2", "--queries", "10", "--seed", "4",
            "--report-dir", str(report_dir),
        ]) == 0
        iloss_rows = list(csv.DictReader((report_dir / "iloss.csv").open()))
        schemes = {row["scheme"] for row in iloss_rows}
        assert schemes == {"mutualcover", "mondrian"}
        summary = json.loads((report_dir / "iloss.json").read_text())
        assert summary["seeds"] == [4, 5]
        query_rows = list(csv.DictReader((report_dir / "query.csv").open()))
        assert {row["scheme"] for row in query_rows} == {"mutualcover", "mondrian", "anatomy"}

    def test_config_file_drives_grid(self, workspace):
        root, data, schema, _ = workspace
        report_dir = root / "reports2"
        config = root / "run.json"
        config.write_text(json.dumps({
            "metrics": "iloss", "deltas": "1/2", "l": 3,
            "repetitions": 2, "seed": 11, "report_dir": str(report_dir),
        }))
        assert main([
            "evaluate", "--input", str(data), "--schema", str(schema),
            "--config", str(config),
        ]) == 0
        assert (report_dir / "iloss.csv").exists()

    def test_disclosure_grid(self, workspace):
        root, data, schema, _ = workspace
        report_dir = root / "reports3"
        assert main([
            "evaluate", "--input", str(data), "--schema", str(schema),
            "--metrics", "disclosure", "--deltas", "1/3", "--p-match", "0.5,1.0",
            "--l", "3", "--repetitions", "2", "--trials", "2", "--seed", "1",
            "--report-dir", str(report_dir),
        ]) == 0
        rows = list(csv.DictReader((report_dir / "disclosure.csv").open()))
        mc_rows = [r for r in rows if r["scheme"] == "mutualcover"]
        # 1 delta x 2 p_match x 2 metrics
        assert len(mc_rows) == 4
        identity_at_one = [
            float(r["avg"]) for r in mc_rows
            if r["metric"] == "identity" and float(r["p_match"]) == 1.0
        ]
        assert identity_at_one == [0.0]
