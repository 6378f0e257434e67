"""
JSON Lines persistence for ledger chains.

One canonical record object per line, UTF-8, LF terminated. Loading replays
each line through append semantics and checks that the stored hashes match.
"""

import json
import logging
from pathlib import Path
from typing import List, Union

from ..errors import TripleEntryError
from .canonical import canonical_json_bytes, serialize_record
from .chain import LedgerChain, append_record
from .records import InvalidRecord, TripleEntryRecord

logger = logging.getLogger(__name__)


class LedgerFileInvalid(TripleEntryError):
    """Raised when a ledger file does not replay into a valid chain."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


def save_chain(chain: LedgerChain, path: Union[str, Path]) -> Path:
    """
    Write a chain to a JSON Lines file.

    Args:
        chain: Chain to persist.
        path: Destination file; parent directories are created.

    Returns:
        The path written.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        for record in chain.records:
            f.write(serialize_record(record))
            f.write(b"\n")
    logger.info(f"Saved {len(chain)} records to {path}")
    return path


def read_records(path: Union[str, Path]) -> List[TripleEntryRecord]:
    """
    Parse every line of a ledger file into a record, without checking hashes.

    Raises:
        LedgerFileInvalid: If a line is not a well-formed record object or
            differs from the canonical serialization of the record it holds.
    """
    path = Path(path)
    records: List[TripleEntryRecord] = []
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise LedgerFileInvalid(0, f"cannot read {path}: {e}") from e

    for line_number, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        try:
            record = TripleEntryRecord.from_dict(json.loads(line))
        except json.JSONDecodeError as e:
            raise LedgerFileInvalid(line_number, f"not a JSON object: {e.msg}") from e
        except InvalidRecord as e:
            raise LedgerFileInvalid(line_number, str(e)) from e
        # lines are stored canonically; anything else was edited by hand
        if canonical_json_bytes(record.to_dict()) != line.encode("utf-8"):
            raise LedgerFileInvalid(line_number, "line is not in canonical form")
        records.append(record)
    return records


def load_chain(
    path: Union[str, Path], owner: str = "shared", verify: bool = True
) -> LedgerChain:
    """
    Load a chain from a JSON Lines file.

    Args:
        path: Ledger file.
        owner: Owner recorded on the loaded chain.
        verify: Replay through append semantics and compare stored hashes.
            With ``verify=False`` records are taken as stored, so a tampered
            file can still be inspected with verify_chain.

    Returns:
        The loaded chain.

    Raises:
        LedgerFileInvalid: On a malformed line or, when verifying, a stored
            hash or link that does not match the replay.
    """
    records = read_records(path)
    if not verify:
        return LedgerChain(records=records, owner=owner)

    chain = LedgerChain(owner=owner)
    for line_number, stored in enumerate(records, start=1):
        if stored.third.prev_record_hash != chain.tail_hash:
            raise LedgerFileInvalid(line_number, "broken link")
        try:
            chain = append_record(chain, stored)
        except TripleEntryError as e:
            raise LedgerFileInvalid(line_number, str(e)) from e
        if chain.records[-1].record_hash != stored.record_hash:
            raise LedgerFileInvalid(line_number, "hash mismatch")

    logger.info(f"Loaded {len(chain)} records from {path}")
    return chain
