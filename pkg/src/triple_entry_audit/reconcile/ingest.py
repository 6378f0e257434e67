"""
Ingestion of external transaction data into triple-entry records.

Tabular (CSV) and line-delimited JSON sources are mapped column-by-column
onto record fields. A bad row never aborts the run: it is rejected with its
line number and a reason, and ingestion moves on.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import pandas as pd

from ..errors import TripleEntryError
from ..ledger import (
    ContextMetadata,
    InvalidRecord,
    TripleEntryRecord,
    minor_unit_digits,
    simple_record,
)
from ..ledger.canonical import validate_record

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("reference_key", "party_from", "party_to", "amount", "occurred_at")
OPTIONAL_FIELDS = (
    "currency",
    "debit_account",
    "credit_account",
    "location",
    "item_description",
    "tags",
    "rationale",
)
JSONL_SUFFIXES = (".jsonl", ".ndjson")


class SourceUnreadable(TripleEntryError):
    """Raised when the source file cannot be opened or parsed as a whole."""

    pass


class MappingIncomplete(TripleEntryError):
    """Raised when the column mapping does not cover the required fields."""

    pass


class _RowRejected(Exception):
    pass


@dataclass(frozen=True)
class IngestMapping:
    """
    How source columns map onto record fields.

    ``columns`` maps record field name to source column name. Fields absent
    from the mapping fall back to the defaults below. With ``ledger_export``
    set, each JSONL line is read as a full serialized record instead.
    """

    columns: Dict[str, str] = field(default_factory=dict)
    currency: Optional[str] = None
    debit_account: str = "receivable"
    credit_account: str = "revenue"
    delimiter: str = ","
    tag_separator: str = ";"
    ledger_export: bool = False

    def validate(self) -> None:
        if self.ledger_export:
            return
        unknown = set(self.columns) - set(REQUIRED_FIELDS) - set(OPTIONAL_FIELDS)
        if unknown:
            raise MappingIncomplete(f"mapping names unknown fields: {sorted(unknown)}")
        missing = [f for f in REQUIRED_FIELDS if not self.columns.get(f)]
        if missing:
            raise MappingIncomplete(f"mapping does not cover: {', '.join(missing)}")
        if "currency" not in self.columns and not self.currency:
            raise MappingIncomplete("mapping needs a currency column or a default currency")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IngestMapping":
        return cls(
            columns=dict(data.get("columns", {})),
            currency=data.get("currency"),
            debit_account=data.get("debit_account", "receivable"),
            credit_account=data.get("credit_account", "revenue"),
            delimiter=data.get("delimiter", ","),
            tag_separator=data.get("tag_separator", ";"),
            ledger_export=bool(data.get("ledger_export", False)),
        )

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "IngestMapping":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise MappingIncomplete(f"cannot read mapping {path}: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def ledger(cls) -> "IngestMapping":
        """Mapping for re-ingesting an exported ledger file."""
        return cls(ledger_export=True)


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: List[Tuple[int, str]] = field(default_factory=list)

    @property
    def rows(self) -> int:
        return self.accepted + len(self.rejected)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "accepted": self.accepted,
            "rejected": [{"line": line, "reason": reason} for line, reason in self.rejected],
        }


def parse_amount(text: Any, currency: str) -> int:
    """
    Parse a decimal amount string into positive minor units.

    The string must carry exactly the currency's minor-unit precision, e.g.
    ``"12.30"`` for USD or ``"1200"`` for JPY.
    """
    if isinstance(text, bool) or not isinstance(text, (str, int)):
        raise _RowRejected("unparseable amount")
    text = str(text).strip()
    digits = minor_unit_digits(currency)
    pattern = rf"^-?\d+\.\d{{{digits}}}$" if digits else r"^-?\d+$"
    if not re.match(pattern, text):
        raise _RowRejected("unparseable amount")
    negative = text.startswith("-")
    minor_units = int(text.lstrip("-").replace(".", ""))
    if negative or minor_units == 0:
        raise _RowRejected("non-positive amount")
    return minor_units


def _cell(row: Dict[str, Any], column: Optional[str]) -> Optional[str]:
    if column is None:
        return None
    value = row.get(column)
    if value is None:
        return None
    if isinstance(value, float) and pd.isna(value):
        return None
    value = str(value).strip() if not isinstance(value, str) else value.strip()
    return value or None


def _row_to_record(row: Dict[str, Any], mapping: IngestMapping) -> TripleEntryRecord:
    cols = mapping.columns
    values = {}
    for name in REQUIRED_FIELDS:
        raw = row.get(cols[name]) if name == "amount" else _cell(row, cols[name])
        if raw is None or (isinstance(raw, str) and not raw.strip()):
            raise _RowRejected(f"missing field {name}")
        values[name] = raw

    currency = _cell(row, cols.get("currency")) or mapping.currency
    if not currency:
        raise _RowRejected("missing field currency")
    minor_units = parse_amount(values["amount"], currency)

    tags_cell = _cell(row, cols.get("tags"))
    tags = (
        frozenset(t.strip() for t in tags_cell.split(mapping.tag_separator) if t.strip())
        if tags_cell
        else frozenset()
    )
    try:
        metadata = ContextMetadata(
            party_from=values["party_from"],
            party_to=values["party_to"],
            occurred_at=values["occurred_at"],
            location=_cell(row, cols.get("location")),
            item_description=_cell(row, cols.get("item_description")),
            tags=tags,
            rationale=_cell(row, cols.get("rationale")),
        )
    except InvalidRecord as e:
        if "occurred_at" in str(e):
            raise _RowRejected("unparseable timestamp") from e
        raise _RowRejected(f"invalid record: {e}") from e

    try:
        return simple_record(
            values["reference_key"],
            _cell(row, cols.get("debit_account")) or mapping.debit_account,
            _cell(row, cols.get("credit_account")) or mapping.credit_account,
            minor_units,
            currency,
            metadata,
        )
    except InvalidRecord as e:
        raise _RowRejected(f"invalid record: {e}") from e


def _export_line_to_record(row: Dict[str, Any]) -> TripleEntryRecord:
    try:
        record = TripleEntryRecord.from_dict(row)
        validate_record(record)
    except InvalidRecord as e:
        raise _RowRejected(f"invalid record: {e}") from e
    return record


def _read_csv_rows(path: Path, mapping: IngestMapping) -> List[Tuple[int, Dict[str, Any]]]:
    try:
        frame = pd.read_csv(
            path,
            sep=mapping.delimiter,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        )
    except (OSError, UnicodeDecodeError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise SourceUnreadable(f"cannot read {path}: {e}") from e

    missing = [c for c in mapping.columns.values() if c not in frame.columns]
    if missing:
        raise MappingIncomplete(f"source {path} has no column(s) {missing}")

    # header is line 1
    return [(i + 2, row) for i, row in enumerate(frame.to_dict(orient="records"))]


def _read_jsonl_rows(path: Path) -> List[Tuple[int, Any]]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SourceUnreadable(f"cannot read {path}: {e}") from e

    rows: List[Tuple[int, Any]] = []
    for line_number, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            rows.append((line_number, json.loads(line)))
        except json.JSONDecodeError:
            rows.append((line_number, None))
    return rows


def ingest_records(
    source: Union[str, Path, Iterable[Dict[str, Any]]],
    mapping: IngestMapping,
) -> Tuple[List[TripleEntryRecord], IngestReport]:
    """
    Turn source rows into unsealed, balanced records.

    Args:
        source: CSV path, JSON Lines path (``.jsonl``/``.ndjson``) or an
            iterable of row dicts.
        mapping: Column mapping and defaults.

    Returns:
        Records in source order and an IngestReport whose accepted and
        rejected counts add up to the number of input rows.

    Raises:
        SourceUnreadable: If the source cannot be read at all.
        MappingIncomplete: If the mapping misses a required field.
    """
    mapping.validate()

    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise SourceUnreadable(f"source {path} does not exist")
        if path.suffix.lower() in JSONL_SUFFIXES or mapping.ledger_export:
            rows = _read_jsonl_rows(path)
        else:
            rows = _read_csv_rows(path, mapping)
        label = str(path)
    else:
        rows = [(i, row) for i, row in enumerate(source, start=1)]
        label = "<rows>"

    logger.info(f"Ingesting {len(rows):,} rows from {label}")
    records: List[TripleEntryRecord] = []
    report = IngestReport()
    seen_keys = set()

    for line_number, row in rows:
        try:
            if not isinstance(row, dict):
                raise _RowRejected("unparseable line")
            if mapping.ledger_export:
                record = _export_line_to_record(row)
            else:
                record = _row_to_record(row, mapping)
            if record.reference_key in seen_keys:
                raise _RowRejected("duplicate reference key")
        except _RowRejected as e:
            report.rejected.append((line_number, str(e)))
            logger.warning(f"Rejected line {line_number}: {e}")
            continue
        seen_keys.add(record.reference_key)
        records.append(record)
        report.accepted += 1

    logger.info(
        f"Ingest complete: {report.accepted:,} accepted, {len(report.rejected):,} rejected"
    )
    return records, report
