"""
Canonical serialization and hashing of triple-entry records.

The canonical form is compact JSON with keys sorted, UTF-8 text left
unescaped and the record_hash field blanked, so two semantically equal
records always hash to the same digest.
"""

import hashlib
import json
from dataclasses import dataclass
from typing import Any

from .records import CurrencyMismatch, InvalidRecord, TripleEntryRecord, UnbalancedRecord


@dataclass(frozen=True)
class BalanceCheck:
    passed: bool
    imbalance: int


def canonical_json_bytes(obj: Any) -> bytes:
    """Serialize a JSON-compatible object in canonical form."""
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def balance_check(record: TripleEntryRecord) -> BalanceCheck:
    """
    Compare debit and credit totals of a record.

    Args:
        record: Record to check.

    Returns:
        BalanceCheck with ``imbalance = sum(debits) - sum(credits)``.

    Raises:
        CurrencyMismatch: If the legs do not all share one currency.
    """
    legs = record.debits + record.credits
    currencies = {leg.amount.currency for leg in legs}
    if len(currencies) != 1:
        raise CurrencyMismatch(
            f"record {record.reference_key!r} mixes currencies {sorted(currencies)}"
        )
    debit_total = sum(leg.amount.minor_units for leg in record.debits)
    credit_total = sum(leg.amount.minor_units for leg in record.credits)
    imbalance = debit_total - credit_total
    return BalanceCheck(passed=imbalance == 0, imbalance=imbalance)


def validate_record(record: TripleEntryRecord) -> None:
    """
    Check the record-level invariants that construction cannot enforce.

    Raises:
        InvalidRecord: If the object is not a record.
        CurrencyMismatch: If legs mix currencies.
        UnbalancedRecord: If debits and credits differ.
    """
    if not isinstance(record, TripleEntryRecord):
        raise InvalidRecord(f"expected TripleEntryRecord, got {type(record).__name__}")
    check = balance_check(record)
    if not check.passed:
        raise UnbalancedRecord(
            f"record {record.reference_key!r} is unbalanced by {check.imbalance} minor units"
        )


def canonicalize_record(record: TripleEntryRecord) -> bytes:
    """
    Canonical byte form of a record with its record_hash blanked.

    Raises:
        InvalidRecord: If any record invariant fails.
    """
    validate_record(record)
    payload = record.to_dict()
    payload["third"]["record_hash"] = ""
    return canonical_json_bytes(payload)


def serialize_record(record: TripleEntryRecord) -> bytes:
    """Canonical byte form including the stored record_hash, as persisted."""
    validate_record(record)
    return canonical_json_bytes(record.to_dict())


def compute_record_hash(record: TripleEntryRecord) -> str:
    """SHA-256 of the canonical form, lowercase hex."""
    return sha256_hex(canonicalize_record(record))
