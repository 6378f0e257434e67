"""
Tests for the command-line surface: exit codes, reports and an end-to-end
ingest -> reconcile -> encode -> detect -> audit -> attest -> verify run.
"""

import json

import pytest

from triple_entry_audit.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run_command
from triple_entry_audit.ledger import build_chain, save_chain

ROWS = [
    ("T1", "A", "B", "12.50", "2024-03-01T09:00:00Z", "NY", "consulting"),
    ("T2", "B", "A", "3.00", "2024-03-01T11:30:00Z", "NY", "refund"),
    ("T3", "A", "B", "7.25", "2024-03-02T10:00:00Z", "SF", "software"),
    ("T4", "A", "B", "9.99", "2024-03-03T15:00:00Z", "NY", "consulting"),
    ("T5", "B", "A", "1.10", "2024-03-04T08:45:00Z", "LA", "refund"),
    ("T6", "A", "B", "450.00", "2024-03-05T03:00:00Z", "LA", "equipment"),
]

MAPPING = {
    "columns": {
        "reference_key": "ref",
        "party_from": "from",
        "party_to": "to",
        "amount": "amount",
        "occurred_at": "when",
        "location": "city",
        "item_description": "memo",
    },
    "currency": "USD",
}

DETECT_ROLES = {"*": "ignore", "amount": "numeric", "hour_of_day": "numeric"}


def _write_source(path, rows):
    lines = ["ref,from,to,amount,when,city,memo"] + [",".join(row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestCommandLine:
    """Test suite for run_command."""

    @pytest.fixture
    def workspace(self, temp_dir):
        _write_source(temp_dir / "a.csv", ROWS)
        _write_source(temp_dir / "b.csv", ROWS)
        (temp_dir / "mapping.json").write_text(json.dumps(MAPPING), encoding="utf-8")
        (temp_dir / "roles.json").write_text(json.dumps(DETECT_ROLES), encoding="utf-8")
        return temp_dir

    def _run(self, capsys, *argv):
        code = run_command([str(arg) for arg in argv])
        out = capsys.readouterr().out
        return code, json.loads(out) if out.strip().startswith("{") else out

    def _pipeline(self, capsys, d):
        steps = [
            ("ingest", "--source", d / "a.csv", "--mapping", d / "mapping.json",
             "--owner", "A", "--out", d / "a.jsonl"),
            ("ingest", "--source", d / "b.csv", "--mapping", d / "mapping.json",
             "--owner", "B", "--out", d / "b.jsonl"),
            ("reconcile", "--ledger", d / "a.jsonl", "--ledger", d / "b.jsonl",
             "--party", "A", "--party", "B"),
            ("encode", "--ledger", d / "a.jsonl", "--out", d / "matrix.parquet",
             "--schema-out", d / "schema.json"),
            ("detect", "--ledger", d / "a.jsonl", "--method", "lof", "--k", "2",
             "--roles", d / "roles.json", "--contamination", "0.2"),
            ("audit-mpc", "--ledger", d / "a.jsonl", "--ledger", d / "b.jsonl",
             "--party", "A", "--party", "B", "--predicate", "net_balance_zero",
             "--seed", "1", "--out", d / "transcript.json"),
            ("attest", "--ledger", d / "a.jsonl", "--transcript", d / "transcript.json",
             "--out", d / "attested.jsonl"),
            ("verify", "--ledger", d / "attested.jsonl"),
        ]
        reports = []
        for argv in steps:
            code, report = self._run(capsys, *argv)
            assert code == EXIT_OK, (argv[0], report)
            reports.append(report)
        return reports

    def test_end_to_end(self, capsys, workspace):
        """Test the full workflow and its reports."""
        ingest_a, _, reconciled, encoded, detected, audited, attested, verified = self._pipeline(
            capsys, workspace
        )
        assert ingest_a["result"]["ingest"]["accepted"] == 6
        assert reconciled["result"]["counts"]["consistent"] == 6
        assert encoded["result"]["rows"] == 6
        assert (workspace / "matrix.parquet").exists()
        assert "T6" in detected["result"]["flagged"]
        assert audited["result"]["verdict"] == "pass"
        assert audited["result"]["linkage"]["linked_count"] == 6
        assert attested["result"]["verified"] is True
        assert verified["result"]["ok"] is True
        assert verified["result"]["records"] == 7
        assert set(verified) == {"command", "config", "exit_code", "inputs", "result", "timing"}

    def test_reruns_are_reproducible(self, capsys, workspace):
        """Test that two identical runs differ only in timing."""
        first = self._pipeline(capsys, workspace)
        second = self._pipeline(capsys, workspace)
        for a, b in zip(first, second):
            a.pop("timing")
            b.pop("timing")
            assert a == b

    def test_input_digests_reported(self, capsys, workspace):
        """Test that reports carry the SHA-256 of each input file."""
        self._pipeline(capsys, workspace)
        _, report = self._run(capsys, "verify", "--ledger", workspace / "a.jsonl")
        digest = report["inputs"][str(workspace / "a.jsonl")]
        assert len(digest) == 64

    def test_tampered_ledger_exit_code(self, capsys, workspace):
        """Test that a failed verification exits 1 and names the record."""
        self._pipeline(capsys, workspace)
        path = workspace / "a.jsonl"
        lines = path.read_text(encoding="utf-8").split("\n")
        lines[2] = lines[2].replace('"minor_units":725', '"minor_units":726')
        path.write_text("\n".join(lines), encoding="utf-8")

        code, report = self._run(capsys, "verify", "--ledger", path)
        assert code == EXIT_FAILURE
        assert report["result"]["ok"] is False
        assert report["result"]["failing_index"] == 2

    def test_failed_audit_exit_code(self, capsys, workspace, make_record):
        """Test that a failing verdict exits 1."""
        save_chain(build_chain([make_record("K1", 100, "A", "B")], owner="A"), workspace / "x.jsonl")
        save_chain(build_chain([make_record("K2", 100, "B", "C")], owner="B"), workspace / "y.jsonl")
        code, report = self._run(
            capsys, "audit-mpc", "--ledger", workspace / "x.jsonl", "--ledger", workspace / "y.jsonl",
            "--party", "A", "--party", "B", "--predicate", "aggregate_below_threshold",
            "--limit", "150", "--seed", "0",
        )
        assert code == EXIT_FAILURE
        assert report["result"]["verdict"] == "fail"

    def test_missing_seed_is_usage_error(self, capsys, workspace):
        """Test that an unseeded stochastic command exits 2 without a report."""
        code, out = self._run(capsys, "detect", "--ledger", workspace / "a.csv", "--method", "iforest")
        assert code == EXIT_USAGE
        assert out == ""

    def test_unknown_command(self, capsys):
        """Test that argparse failures map to exit code 2."""
        code, _ = self._run(capsys, "launch")
        assert code == EXIT_USAGE

    def test_domain_error_report(self, capsys, workspace):
        """Test that a domain error still writes a report and exits 1."""
        code, report = self._run(capsys, "verify", "--ledger", workspace / "missing.jsonl")
        assert code == EXIT_FAILURE
        assert report["exit_code"] == EXIT_FAILURE

    def test_text_format(self, capsys, workspace):
        """Test the human-readable report."""
        self._pipeline(capsys, workspace)
        code, out = self._run(capsys, "verify", "--ledger", workspace / "a.jsonl", "--format", "text")
        assert code == EXIT_OK
        assert "command: verify" in out
        assert "configuration" in out
