"""
Run reports: the JSON or text document a command writes to standard output.

A report echoes the command and its configuration, carries the result
payload and the SHA-256 of every input file, and keeps wall-clock timing in
its own field so two identical runs differ only there.
"""

import hashlib
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable

import numpy as np
from rich.console import Console
from rich.table import Table

TEXT_WIDTH = 100


@dataclass
class Report:
    command: str
    config: Dict[str, Any]
    result: Dict[str, Any]
    inputs: Dict[str, str] = field(default_factory=dict)
    exit_code: int = 0
    timing: Dict[str, float] = field(default_factory=dict)

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        document = {
            "command": self.command,
            "config": self.config,
            "exit_code": self.exit_code,
            "inputs": self.inputs,
            "result": self.result,
        }
        if include_timing:
            document["timing"] = self.timing
        return to_jsonable(document)


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def input_hashes(paths: Iterable[Path]) -> Dict[str, str]:
    """SHA-256 per existing input path, keyed by the path as given."""
    return {str(p): file_sha256(p) for p in paths if Path(p).is_file()}


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, paths, sets and enums to JSON types."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        # JSON has no infinities
        return None if np.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def render_json(report: Report) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        text = json.dumps(value, sort_keys=True, ensure_ascii=False)
        return text if len(text) <= 80 else f"{text[:77]}..."
    return str(value)


def render_text(report: Report) -> str:
    """Human-readable summary rendered with rich, without colour codes."""
    document = report.to_dict()
    console = Console(
        record=True,
        width=TEXT_WIDTH,
        color_system=None,
        file=io.StringIO(),
        force_terminal=False,
    )
    console.print(f"command: {report.command}")
    result = document["result"]
    if "verdict" in result:
        console.print(f"verdict: {result['verdict']}")
    console.print(f"exit code: {report.exit_code}")

    config_table = Table(title="configuration")
    config_table.add_column("setting")
    config_table.add_column("value")
    for key, value in sorted(document["config"].items()):
        config_table.add_row(key, _cell(value))
    console.print(config_table)

    result_table = Table(title="result")
    result_table.add_column("field")
    result_table.add_column("value")
    for key, value in sorted(result.items()):
        result_table.add_row(key, _cell(value))
    console.print(result_table)

    if document["inputs"]:
        inputs_table = Table(title="inputs")
        inputs_table.add_column("path")
        inputs_table.add_column("sha256")
        for path, digest in sorted(document["inputs"].items()):
            inputs_table.add_row(path, digest)
        console.print(inputs_table)

    if report.timing:
        console.print(f"elapsed: {report.timing.get('elapsed_seconds', 0.0):.3f}s")
    return console.export_text()


def emit_report(report: Report, fmt: str = "json") -> str:
    """Serialize a report as ``json`` (sorted keys) or ``text``."""
    return render_text(report) if fmt == "text" else render_json(report) + "\n"
