"""
Cross-ledger matching and reconciliation by shared reference key.

The reference key is the only join key. Matched pairs are classified as
consistent, amount_mismatch or metadata_divergence; the report flags
discrepancies and never decides which side is right.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..errors import TripleEntryError
from ..ledger import LedgerChain, TripleEntryRecord

logger = logging.getLogger(__name__)

COMPARED_METADATA_FIELDS = (
    "item_description",
    "location",
    "occurred_at",
    "party_from",
    "party_to",
    "rationale",
    "tags",
)


class DuplicateKeyWithinChain(TripleEntryError):
    """Raised when one input chain repeats a reference key."""

    pass


class MatchStatus(str, Enum):
    CONSISTENT = "consistent"
    AMOUNT_MISMATCH = "amount_mismatch"
    METADATA_DIVERGENCE = "metadata_divergence"


@dataclass(frozen=True)
class MatchResult:
    pairs: List[Tuple[str, TripleEntryRecord, TripleEntryRecord]]
    leftovers: List[Tuple[str, str]]


@dataclass(frozen=True)
class MatchedEntry:
    reference_key: str
    status: MatchStatus
    difference: Optional[int] = None
    fields: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "difference": self.difference,
            "fields": list(self.fields),
            "reference_key": self.reference_key,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class UnmatchedEntry:
    reference_key: str
    present_in: str

    def to_dict(self) -> Dict[str, Any]:
        return {"present_in": self.present_in, "reference_key": self.reference_key}


@dataclass
class ReconciliationReport:
    party_a: str
    party_b: str
    matched: List[MatchedEntry] = field(default_factory=list)
    unmatched: List[UnmatchedEntry] = field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        counts = {status.value: 0 for status in MatchStatus}
        for entry in self.matched:
            counts[entry.status.value] += 1
        counts["unmatched"] = len(self.unmatched)
        return counts

    def keys_with_status(self, status: MatchStatus) -> List[str]:
        return [e.reference_key for e in self.matched if e.status == status]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "counts": self.counts(),
            "matched": [e.to_dict() for e in self.matched],
            "party_a": self.party_a,
            "party_b": self.party_b,
            "unmatched": [e.to_dict() for e in self.unmatched],
        }


def _index_by_key(chain: LedgerChain, label: str) -> Dict[str, TripleEntryRecord]:
    index: Dict[str, TripleEntryRecord] = {}
    for record in chain.records:
        if record.reference_key in index:
            raise DuplicateKeyWithinChain(
                f"reference key {record.reference_key!r} repeats in chain {label!r}"
            )
        index[record.reference_key] = record
    return index


def _labels(a: LedgerChain, b: LedgerChain) -> Tuple[str, str]:
    if a.owner != b.owner:
        return a.owner, b.owner
    return "a", "b"


def match_by_reference_key(a: LedgerChain, b: LedgerChain) -> MatchResult:
    """
    Pair records of two chains that share a reference key.

    Pairs follow chain a's order. Leftovers are labelled with the owner of
    the chain that holds them (or "a"/"b" when both chains share an owner):
    first keys only in a, then keys only in b.

    Raises:
        DuplicateKeyWithinChain: If either chain repeats a key.
    """
    label_a, label_b = _labels(a, b)
    index_a = _index_by_key(a, label_a)
    index_b = _index_by_key(b, label_b)

    pairs = [(key, rec, index_b[key]) for key, rec in index_a.items() if key in index_b]
    leftovers = [(key, label_a) for key in index_a if key not in index_b]
    leftovers += [(key, label_b) for key in index_b if key not in index_a]
    return MatchResult(pairs=pairs, leftovers=leftovers)


def _present(value: Any) -> bool:
    if value is None:
        return False
    if isinstance(value, frozenset):
        return len(value) > 0
    return True


def divergent_fields(a: TripleEntryRecord, b: TripleEntryRecord) -> List[str]:
    """Metadata fields present on both sides whose values differ."""
    differing = []
    for name in COMPARED_METADATA_FIELDS:
        value_a = getattr(a.metadata, name)
        value_b = getattr(b.metadata, name)
        if _present(value_a) and _present(value_b) and value_a != value_b:
            differing.append(name)
    if a.currency != b.currency:
        differing.append("currency")
    return sorted(differing)


def reconcile(a: LedgerChain, b: LedgerChain) -> ReconciliationReport:
    """
    Compare two party ledgers record by record.

    A pair is consistent when both sides book the same amount and agree on
    every metadata field present on both. An amount difference wins over
    metadata differences; the signed difference is ``amount(a) - amount(b)``.
    """
    label_a, label_b = _labels(a, b)
    match = match_by_reference_key(a, b)
    report = ReconciliationReport(party_a=label_a, party_b=label_b)

    for key, record_a, record_b in match.pairs:
        differing = tuple(divergent_fields(record_a, record_b))
        difference = record_a.amount - record_b.amount
        if difference != 0:
            entry = MatchedEntry(key, MatchStatus.AMOUNT_MISMATCH, difference, differing)
        elif differing:
            entry = MatchedEntry(key, MatchStatus.METADATA_DIVERGENCE, None, differing)
        else:
            entry = MatchedEntry(key, MatchStatus.CONSISTENT)
        report.matched.append(entry)

    report.unmatched = [UnmatchedEntry(key, owner) for key, owner in match.leftovers]

    counts = report.counts()
    logger.info(
        f"Reconciled {label_a} vs {label_b}: "
        + ", ".join(f"{name}={count}" for name, count in counts.items())
    )
    return report


def reconciliation_report_to_json(report: ReconciliationReport) -> str:
    """Serialize a report to the documented JSON document."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False)
