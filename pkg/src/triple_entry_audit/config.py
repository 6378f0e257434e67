"""
Run configuration for the triple-entry audit toolkit.

This module holds the named defaults every operation falls back to and the
RunConfig class that turns a parsed command line into validated, typed
settings. Nothing is read from the environment: a run is fully determined
by its flags and input files.
"""

import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from .errors import ConfigError

# ============================================================================
# ANALYTICS DEFAULTS
# ============================================================================

IFOREST_TREES = 100
IFOREST_MAX_SUBSAMPLE = 256
LOF_K = 10
KMEANS_K = 3
KMEANS_MAX_ITER = 300
DBSCAN_EPS = 0.5
DBSCAN_MIN_PTS = 5
CONTAMINATION = 0.01

LOGISTIC_LEARNING_RATE = 0.1
LOGISTIC_MAX_ITER = 1000
LOGISTIC_L2 = 1e-4
LOGISTIC_GRAD_TOL = 1e-8

TREE_MAX_DEPTH = 5
TREE_MIN_SAMPLES_SPLIT = 2

TEST_FRACTION = 0.25

# ============================================================================
# MINING / FORECAST DEFAULTS
# ============================================================================

MIN_SUPPORT = 0.05
MIN_CONFIDENCE = 0.6
FORECAST_HORIZON_DAYS = 7

# ============================================================================
# AUDIT DEFAULTS
# ============================================================================

CAPITAL_ACCOUNT_PREFIX = "equity"
EXPOSURE_ACCOUNT_PREFIX = "loans"

# ============================================================================
# COMMAND SURFACE
# ============================================================================

COMMANDS = (
    "init",
    "record",
    "verify",
    "ingest",
    "reconcile",
    "encode",
    "train",
    "detect",
    "cluster",
    "mine",
    "forecast",
    "audit-mpc",
    "attest",
)

METHODS_BY_COMMAND: Dict[str, tuple] = {
    "train": ("logistic", "tree"),
    "detect": ("iforest", "lof"),
    "cluster": ("kmeans", "dbscan"),
}

# (command, method) pairs whose result depends on a random stream; None matches any method
SEEDED_RUNS = {
    ("train", None),
    ("detect", "iforest"),
    ("cluster", "kmeans"),
    ("audit-mpc", None),
}

REPORT_FORMATS = ("json", "text")
MINING_ALGORITHMS = ("apriori", "eclat")


class RunConfig:
    """
    Validated settings for one command-line run.

    Built from an argparse namespace by sectioned loaders; every numeric
    parameter is checked against the range accepted by the operation the
    command dispatches to, so a bad flag fails before any input is read.
    """

    def __init__(self, args: argparse.Namespace) -> None:
        """
        Initialize the run configuration from parsed arguments.

        Args:
            args: Namespace produced by the CLI parser.

        Raises:
            ConfigError: If a parameter is missing or out of range.
        """
        self.logger = logging.getLogger(__name__)
        self._args = args

        self.COMMAND: str = args.command
        if self.COMMAND not in COMMANDS:
            raise ConfigError(f"Unknown command: {self.COMMAND}")

        self._load_path_settings()
        self._load_method_settings()
        self._load_numeric_settings()
        self._load_output_settings()

        self.logger.debug(f"Run configuration loaded: {self!r}")

    def _arg(self, name: str, default: Any = None) -> Any:
        value = getattr(self._args, name, None)
        return default if value is None else value

    def _load_path_settings(self) -> None:
        """Load input and output paths."""
        self.LEDGER_PATHS: List[Path] = [Path(p) for p in self._arg("ledger", [])]
        parties = list(self._arg("party", []))
        if parties and len(parties) != len(self.LEDGER_PATHS):
            raise ConfigError("--party must be given once per --ledger")
        self.PARTIES: List[str] = parties or [p.stem for p in self.LEDGER_PATHS]
        if self.COMMAND in ("reconcile", "audit-mpc") and len(set(self.PARTIES)) != len(
            self.PARTIES
        ):
            raise ConfigError(f"party ids must be distinct, got {self.PARTIES}")
        self.OUT_PATH: Optional[Path] = (
            Path(self._arg("out")) if self._arg("out") else None
        )
        self.SOURCE_PATH = Path(self._arg("source")) if self._arg("source") else None
        self.MAPPING_PATH = Path(self._arg("mapping")) if self._arg("mapping") else None
        self.RECORD_PATH = Path(self._arg("record")) if self._arg("record") else None
        self.TRANSCRIPT_PATH = (
            Path(self._arg("transcript")) if self._arg("transcript") else None
        )
        self.ROLES_PATH = Path(self._arg("roles")) if self._arg("roles") else None
        self.SCHEMA_OUT = (
            Path(self._arg("schema_out")) if self._arg("schema_out") else None
        )
        self.OWNER: str = self._arg("owner", "shared")

        required_ledgers = {
            "record": 1,
            "verify": 1,
            "reconcile": 2,
            "encode": 1,
            "train": 1,
            "detect": 1,
            "cluster": 1,
            "mine": 1,
            "forecast": 1,
            "audit-mpc": 2,
            "attest": 1,
        }
        needed = required_ledgers.get(self.COMMAND, 0)
        if self.COMMAND in ("reconcile",) and len(self.LEDGER_PATHS) != 2:
            raise ConfigError("reconcile takes exactly two --ledger paths")
        if len(self.LEDGER_PATHS) < needed:
            raise ConfigError(
                f"{self.COMMAND} needs at least {needed} --ledger path(s), "
                f"got {len(self.LEDGER_PATHS)}"
            )

        if self.COMMAND in ("init", "record", "ingest", "attest") and not self.OUT_PATH:
            raise ConfigError(f"{self.COMMAND} requires --out")
        if self.COMMAND == "ingest" and not (self.SOURCE_PATH and self.MAPPING_PATH):
            raise ConfigError("ingest requires --source and --mapping")
        if self.COMMAND == "record" and not self.RECORD_PATH:
            raise ConfigError("record requires --record")
        if self.COMMAND == "attest" and not self.TRANSCRIPT_PATH:
            raise ConfigError("attest requires --transcript")

        self.RECORDED_AT: Optional[str] = self._arg("recorded_at")
        self.DELIMITER: Optional[str] = self._arg("delimiter")

    def _load_method_settings(self) -> None:
        """Load algorithm selection for commands that offer several methods."""
        allowed = METHODS_BY_COMMAND.get(self.COMMAND)
        method = self._arg("method")
        if allowed is None:
            if method is not None:
                raise ConfigError(f"{self.COMMAND} does not take --method")
            self.METHOD: Optional[str] = None
        else:
            method = method or allowed[0]
            if method not in allowed:
                raise ConfigError(
                    f"--method {method} is not valid for {self.COMMAND}; "
                    f"choose one of {', '.join(allowed)}"
                )
            self.METHOD = method

        self.ALGORITHM: str = self._arg("algorithm", "apriori")
        if self.ALGORITHM not in MINING_ALGORITHMS:
            raise ConfigError(
                f"--algorithm must be one of {', '.join(MINING_ALGORITHMS)}, got {self.ALGORITHM}"
            )
        self.PREDICATE: Optional[str] = self._arg("predicate")
        if self.COMMAND == "audit-mpc" and not self.PREDICATE:
            raise ConfigError("audit-mpc requires --predicate")
        self.TARGET: Optional[str] = self._arg("target")
        if self.COMMAND == "train" and not self.TARGET:
            raise ConfigError("train requires --target")

    def _load_numeric_settings(self) -> None:
        """Load numeric parameters and check them against operation ranges."""
        seed = self._arg("seed")
        seeded = (self.COMMAND, None) in SEEDED_RUNS or (
            self.COMMAND,
            self.METHOD,
        ) in SEEDED_RUNS
        if seeded and seed is None:
            raise ConfigError(f"{self.COMMAND} is stochastic and requires --seed")
        if seed is not None and seed < 0:
            raise ConfigError(f"--seed must be non-negative, got {seed}")
        self.SEED: Optional[int] = seed

        default_k = LOF_K if self.METHOD == "lof" else KMEANS_K
        self.K: int = self._arg("k", default_k)
        if self.K < 1:
            raise ConfigError(f"--k must be >= 1, got {self.K}")

        self.EPS: float = self._arg("eps", DBSCAN_EPS)
        if not self.EPS > 0:
            raise ConfigError(f"--eps must be > 0, got {self.EPS}")
        self.MIN_PTS: int = self._arg("min_pts", DBSCAN_MIN_PTS)
        if self.MIN_PTS < 1:
            raise ConfigError(f"--min-pts must be >= 1, got {self.MIN_PTS}")
        self.MAX_ITER: int = self._arg("max_iter", KMEANS_MAX_ITER)
        if self.MAX_ITER < 1:
            raise ConfigError(f"--max-iter must be >= 1, got {self.MAX_ITER}")

        self.MIN_SUPPORT: float = self._arg("min_support", MIN_SUPPORT)
        if not 0 < self.MIN_SUPPORT <= 1:
            raise ConfigError(f"--min-support must be in (0, 1], got {self.MIN_SUPPORT}")
        self.MIN_CONFIDENCE: float = self._arg("min_confidence", MIN_CONFIDENCE)
        if not 0 <= self.MIN_CONFIDENCE <= 1:
            raise ConfigError(
                f"--min-confidence must be in [0, 1], got {self.MIN_CONFIDENCE}"
            )

        self.TEST_FRACTION: float = self._arg("test_fraction", TEST_FRACTION)
        if not 0 < self.TEST_FRACTION < 1:
            raise ConfigError(
                f"--test-fraction must be in (0, 1), got {self.TEST_FRACTION}"
            )

        self.TREES: int = self._arg("trees", IFOREST_TREES)
        if self.TREES < 1:
            raise ConfigError(f"--trees must be >= 1, got {self.TREES}")
        self.SUBSAMPLE: Optional[int] = self._arg("subsample")
        if self.SUBSAMPLE is not None and self.SUBSAMPLE < 2:
            raise ConfigError(f"--subsample must be >= 2, got {self.SUBSAMPLE}")
        self.CONTAMINATION: float = self._arg("contamination", CONTAMINATION)
        if not 0 < self.CONTAMINATION < 1:
            raise ConfigError(
                f"--contamination must be in (0, 1), got {self.CONTAMINATION}"
            )

        self.HORIZON: int = self._arg("horizon", FORECAST_HORIZON_DAYS)
        self.LIMIT: Optional[int] = self._arg("limit")
        self.MIN_RATIO: Optional[float] = self._arg("min_ratio")

    def _load_output_settings(self) -> None:
        """Load report format and guard input files against being overwritten."""
        self.FORMAT: str = self._arg("format", "json")
        if self.FORMAT not in REPORT_FORMATS:
            raise ConfigError(f"--format must be json or text, got {self.FORMAT}")

        if self.OUT_PATH is not None:
            inputs = list(self.LEDGER_PATHS)
            inputs += [
                p
                for p in (self.SOURCE_PATH, self.MAPPING_PATH, self.TRANSCRIPT_PATH)
                if p is not None
            ]
            out_resolved = self.OUT_PATH.resolve()
            for path in inputs:
                if path.resolve() == out_resolved:
                    raise ConfigError(
                        f"--out {self.OUT_PATH} would overwrite input {path}"
                    )

    def input_paths(self) -> List[Path]:
        """Return every input file this run reads, in flag order."""
        paths = list(self.LEDGER_PATHS)
        for path in (
            self.SOURCE_PATH,
            self.MAPPING_PATH,
            self.RECORD_PATH,
            self.TRANSCRIPT_PATH,
            self.ROLES_PATH,
        ):
            if path is not None:
                paths.append(path)
        return paths

    def to_dict(self) -> Dict[str, Any]:
        """
        Config echo placed in every report.

        Only settings that influence the command's result are included, so
        two runs with the same flags echo the same document.
        """
        echo: Dict[str, Any] = {
            "command": self.COMMAND,
            "format": self.FORMAT,
            "seed": self.SEED,
            "ledgers": [str(p) for p in self.LEDGER_PATHS],
        }
        if self.OUT_PATH is not None:
            echo["out"] = str(self.OUT_PATH)
        if self.METHOD is not None:
            echo["method"] = self.METHOD

        per_command = {
            "ingest": {
                "source": str(self.SOURCE_PATH),
                "mapping": str(self.MAPPING_PATH),
                "owner": self.OWNER,
                "delimiter": self.DELIMITER,
            },
            "init": {"owner": self.OWNER},
            "encode": {"target": self.TARGET, "roles": self._opt(self.ROLES_PATH)},
            "train": {
                "target": self.TARGET,
                "test_fraction": self.TEST_FRACTION,
                "roles": self._opt(self.ROLES_PATH),
            },
            "mine": {
                "min_support": self.MIN_SUPPORT,
                "min_confidence": self.MIN_CONFIDENCE,
                "algorithm": self.ALGORITHM,
            },
            "forecast": {"horizon": self.HORIZON},
            "reconcile": {"parties": list(self.PARTIES)},
            "audit-mpc": {
                "parties": list(self.PARTIES),
                "predicate": self.PREDICATE,
                "limit": self.LIMIT,
                "min_ratio": self.MIN_RATIO,
            },
            "attest": {
                "transcript": self._opt(self.TRANSCRIPT_PATH),
                "recorded_at": self.RECORDED_AT,
            },
            "record": {"record": self._opt(self.RECORD_PATH)},
        }
        echo.update(per_command.get(self.COMMAND, {}))

        if self.COMMAND == "detect":
            echo["target"] = self.TARGET
            echo["contamination"] = self.CONTAMINATION
            echo["roles"] = self._opt(self.ROLES_PATH)
            if self.METHOD == "iforest":
                echo["trees"] = self.TREES
                echo["subsample"] = self.SUBSAMPLE
            else:
                echo["k"] = self.K
        elif self.COMMAND == "cluster":
            echo["roles"] = self._opt(self.ROLES_PATH)
            if self.METHOD == "kmeans":
                echo["k"] = self.K
                echo["max_iter"] = self.MAX_ITER
            else:
                echo["eps"] = self.EPS
                echo["min_pts"] = self.MIN_PTS
        return echo

    @staticmethod
    def _opt(path: Optional[Path]) -> Optional[str]:
        return str(path) if path is not None else None

    def __repr__(self) -> str:
        """String representation of configuration for debugging."""
        return (
            f"RunConfig("
            f"COMMAND='{self.COMMAND}', "
            f"METHOD={self.METHOD!r}, "
            f"SEED={self.SEED}, "
            f"LEDGERS={[str(p) for p in self.LEDGER_PATHS]}, "
            f"FORMAT='{self.FORMAT}'"
            f")"
        )
