"""
Command-line interface for the triple-entry audit toolkit.

Usage:
    triple-entry-audit init --out ledger.jsonl --owner A
    triple-entry-audit verify --ledger ledger.jsonl
    triple-entry-audit detect --ledger ledger.jsonl --method iforest --seed 42
    triple-entry-audit audit-mpc --ledger a.jsonl --ledger b.jsonl \\
        --predicate net_balance_zero --seed 1 --out transcript.json

Exit codes: 0 success, 1 domain failure (failed verification, failed audit,
rejected input), 2 usage or configuration error. The report goes to
standard output, logs to standard error.
"""

import argparse
import logging
import sys
import time
from typing import List, Optional

from . import __version__
from .commands import HANDLERS
from .config import REPORT_FORMATS, RunConfig
from .errors import ConfigError, TripleEntryError
from .reporting import Report, emit_report, input_hashes

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def setup_logging(verbose: bool = False) -> None:
    """Configure logging to standard error."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(levelname)s - %(module)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
    )


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--ledger", action="append", default=None, help="Ledger file (repeat for several)"
    )
    common.add_argument(
        "--party", action="append", default=None, help="Party id per --ledger (default: file stem)"
    )
    common.add_argument("--out", help="Output path")
    common.add_argument("--owner", help="Owner of the loaded or created chain")
    common.add_argument("--seed", type=int, help="Seed for stochastic commands")
    common.add_argument("--format", choices=REPORT_FORMATS, help="Report format")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="triple-entry-audit",
        description="Triple-entry ledger, audit analytics and simulated MPC audits",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    common = _common_arguments()

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    add("init", "Create an empty ledger file")

    p = add("record", "Append one record (JSON object) to a ledger")
    p.add_argument("--record", required=True, help="JSON file holding the record")

    add("verify", "Verify every hash and link of a ledger")

    p = add("ingest", "Build a ledger from a CSV or JSON Lines source")
    p.add_argument("--source", required=True, help="CSV or JSON Lines file")
    p.add_argument("--mapping", required=True, help="Column mapping JSON")
    p.add_argument("--delimiter", help="CSV delimiter override")

    add("reconcile", "Match two party ledgers by reference key")

    for name, help_text in (
        ("encode", "Encode ledger records into a feature matrix"),
        ("train", "Train and evaluate a classifier"),
        ("detect", "Score records for anomalies"),
        ("cluster", "Cluster encoded records"),
    ):
        p = add(name, help_text)
        p.add_argument("--roles", help="JSON object of field -> role")
        if name != "cluster":
            p.add_argument("--target", help="Label field or tag:<name>")
        if name == "encode":
            p.add_argument("--schema-out", dest="schema_out", help="Write the fitted schema here")
        if name in ("train", "detect", "cluster"):
            p.add_argument("--method", help="Algorithm")
        if name == "train":
            p.add_argument("--test-fraction", dest="test_fraction", type=float)
        if name == "detect":
            p.add_argument("--trees", type=int)
            p.add_argument("--subsample", type=int)
            p.add_argument("--contamination", type=float)
        if name in ("detect", "cluster"):
            p.add_argument("--k", type=int)
        if name == "cluster":
            p.add_argument("--eps", type=float)
            p.add_argument("--min-pts", dest="min_pts", type=int)
            p.add_argument("--max-iter", dest="max_iter", type=int)

    p = add("mine", "Mine frequent itemsets and association rules")
    p.add_argument("--min-support", dest="min_support", type=float)
    p.add_argument("--min-confidence", dest="min_confidence", type=float)
    p.add_argument("--algorithm", choices=("apriori", "eclat"))

    p = add("forecast", "Forecast the daily transaction total")
    p.add_argument("--horizon", type=int, help="Days past the last observed day")

    p = add("audit-mpc", "Run a simulated multi-party compliance audit")
    p.add_argument("--predicate", required=True)
    p.add_argument("--limit", type=int, help="Limit for aggregate_below_threshold")
    p.add_argument("--min-ratio", dest="min_ratio", type=float)

    p = add("attest", "Record an audit transcript's verdict on a ledger")
    p.add_argument("--transcript", required=True)
    p.add_argument("--recorded-at", dest="recorded_at")

    return parser


def run_command(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one command and print its report.

    Returns:
        The process exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse already printed the synopsis to stderr
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    setup_logging(getattr(args, "verbose", False))
    start_time = time.time()
    try:
        config = RunConfig(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    inputs = input_hashes(config.input_paths())
    try:
        outcome = HANDLERS[config.COMMAND](config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_USAGE
    except TripleEntryError as e:
        logger.error(f"{config.COMMAND} failed: {type(e).__name__}: {e}")
        report = Report(
            command=config.COMMAND,
            config=config.to_dict(),
            result={"error": type(e).__name__, "message": str(e)},
            inputs=inputs,
            exit_code=EXIT_FAILURE,
            timing={"elapsed_seconds": time.time() - start_time},
        )
        sys.stdout.write(emit_report(report, config.FORMAT))
        return EXIT_FAILURE

    report = Report(
        command=config.COMMAND,
        config=config.to_dict(),
        result=outcome.result,
        inputs=inputs,
        exit_code=outcome.exit_code,
        timing={"elapsed_seconds": time.time() - start_time},
    )
    sys.stdout.write(emit_report(report, config.FORMAT))
    logger.info(f"{config.COMMAND} finished with exit code {outcome.exit_code}")
    return outcome.exit_code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
