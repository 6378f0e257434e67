"""
Tests for the RunConfig class.

This module tests flag validation, defaults, seed requirements and the
configuration echo placed in every report.
"""

from pathlib import Path

import pytest

from triple_entry_audit.cli import build_parser
from triple_entry_audit.config import CONTAMINATION, KMEANS_K, LOF_K, RunConfig
from triple_entry_audit.errors import ConfigError


def _config(*argv):
    return RunConfig(build_parser().parse_args(list(argv)))


class TestRunConfig:
    """Test suite for RunConfig class."""

    def test_detect_defaults(self):
        """Test default method and parameters of detect."""
        config = _config("detect", "--ledger", "l.jsonl", "--seed", "1")
        assert config.METHOD == "iforest"
        assert config.CONTAMINATION == CONTAMINATION
        assert config.SUBSAMPLE is None
        assert config.FORMAT == "json"

    def test_k_default_depends_on_method(self):
        """Test that LOF and k-means have their own k defaults."""
        assert _config("detect", "--ledger", "l.jsonl", "--method", "lof").K == LOF_K
        assert _config("cluster", "--ledger", "l.jsonl", "--seed", "0").K == KMEANS_K

    @pytest.mark.parametrize(
        "argv",
        [
            ["train", "--ledger", "l.jsonl", "--target", "tag:fraud"],
            ["detect", "--ledger", "l.jsonl", "--method", "iforest"],
            ["cluster", "--ledger", "l.jsonl", "--method", "kmeans"],
            ["audit-mpc", "--ledger", "a.jsonl", "--ledger", "b.jsonl", "--predicate", "net_balance_zero"],
        ],
    )
    def test_stochastic_runs_need_seed(self, argv):
        """Test that every stochastic command refuses to run unseeded."""
        with pytest.raises(ConfigError, match="--seed"):
            _config(*argv)

    def test_deterministic_runs_need_no_seed(self):
        """Test that LOF and DBSCAN run without a seed."""
        assert _config("detect", "--ledger", "l.jsonl", "--method", "lof").SEED is None
        assert _config("cluster", "--ledger", "l.jsonl", "--method", "dbscan").SEED is None

    def test_parties_default_to_file_stems(self):
        """Test party ids taken from ledger file names."""
        config = _config(
            "reconcile", "--ledger", "books/alice.jsonl", "--ledger", "books/bob.jsonl"
        )
        assert config.PARTIES == ["alice", "bob"]
        assert config.LEDGER_PATHS == [Path("books/alice.jsonl"), Path("books/bob.jsonl")]

    def test_party_flags(self):
        """Test repeated --party and its count check."""
        config = _config(
            "reconcile", "--ledger", "x.jsonl", "--ledger", "y.jsonl", "--party", "A", "--party", "B"
        )
        assert config.PARTIES == ["A", "B"]
        with pytest.raises(ConfigError):
            _config("reconcile", "--ledger", "x.jsonl", "--ledger", "y.jsonl", "--party", "A")
        with pytest.raises(ConfigError):
            _config(
                "reconcile", "--ledger", "x.jsonl", "--ledger", "y.jsonl", "--party", "A", "--party", "A"
            )

    def test_reconcile_needs_two_ledgers(self):
        """Test the ledger count of reconcile."""
        with pytest.raises(ConfigError):
            _config("reconcile", "--ledger", "x.jsonl")

    @pytest.mark.parametrize(
        "argv",
        [
            ["detect", "--ledger", "l.jsonl", "--method", "lof", "--contamination", "1.5"],
            ["detect", "--ledger", "l.jsonl", "--method", "lof", "--k", "0"],
            ["detect", "--ledger", "l.jsonl", "--method", "svm"],
            ["cluster", "--ledger", "l.jsonl", "--method", "dbscan", "--eps", "0"],
            ["mine", "--ledger", "l.jsonl", "--min-support", "0"],
            ["train", "--ledger", "l.jsonl", "--seed", "1", "--target", "t", "--test-fraction", "1"],
            ["train", "--ledger", "l.jsonl", "--seed", "1"],
            ["detect", "--ledger", "l.jsonl", "--seed", "-3"],
        ],
    )
    def test_out_of_range_values(self, argv):
        """Test that invalid parameters fail before any input is read."""
        with pytest.raises(ConfigError):
            _config(*argv)

    def test_output_may_not_overwrite_input(self):
        """Test the --out guard."""
        with pytest.raises(ConfigError, match="overwrite"):
            _config("attest", "--ledger", "l.jsonl", "--transcript", "t.json", "--out", "l.jsonl")

    def test_required_outputs(self):
        """Test commands that must write somewhere."""
        with pytest.raises(ConfigError):
            _config("init")
        assert _config("init", "--out", "new.jsonl", "--owner", "A").OWNER == "A"

    def test_echo_holds_only_relevant_settings(self):
        """Test the configuration echo of a detect run."""
        echo = _config("detect", "--ledger", "l.jsonl", "--method", "lof", "--k", "7").to_dict()
        assert echo["k"] == 7
        assert echo["method"] == "lof"
        assert "trees" not in echo
        assert "min_support" not in echo

    def test_input_paths(self):
        """Test the list of files whose digests are reported."""
        config = _config(
            "ingest", "--source", "s.csv", "--mapping", "m.json", "--out", "o.jsonl"
        )
        assert config.input_paths() == [Path("s.csv"), Path("m.json")]
