"""
Append-only, hash-chained ledger.

Every appended record is linked to its predecessor's hash (or the genesis
constant) and sealed with its own hash. Chains are immutable values:
append_record returns a new chain and leaves the old one untouched.
"""

import dataclasses
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Optional, Tuple

from ..errors import TripleEntryError
from .canonical import balance_check, compute_record_hash
from .records import (
    GENESIS_HASH,
    InvalidRecord,
    TripleEntryRecord,
    UnbalancedRecord,
)

logger = logging.getLogger(__name__)


class DuplicateReferenceKey(TripleEntryError):
    """Raised when a reference key is already present in the chain."""

    pass


class ReadOnlyView(TripleEntryError):
    """Raised when appending to a party view."""

    pass


@dataclass(frozen=True)
class LedgerChain:
    records: Tuple[TripleEntryRecord, ...] = ()
    owner: str = "shared"
    is_view: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, index: int) -> TripleEntryRecord:
        return self.records[index]

    @cached_property
    def reference_keys(self) -> FrozenSet[str]:
        return frozenset(r.reference_key for r in self.records)

    @property
    def tail_hash(self) -> str:
        return self.records[-1].record_hash if self.records else GENESIS_HASH

    def find(self, reference_key: str) -> Optional[TripleEntryRecord]:
        """Return the record with this reference key, if present."""
        for record in self.records:
            if record.reference_key == reference_key:
                return record
        return None


@dataclass(frozen=True)
class ChainVerification:
    ok: bool
    failing_index: Optional[int] = None
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, object]:
        return {
            "failing_index": self.failing_index,
            "ok": self.ok,
            "reason": self.reason,
        }


def seal_record(record: TripleEntryRecord, prev_record_hash: str) -> TripleEntryRecord:
    """Set the prev link on a record and stamp its record_hash."""
    linked = dataclasses.replace(
        record,
        third=dataclasses.replace(
            record.third, prev_record_hash=prev_record_hash, record_hash=""
        ),
    )
    return dataclasses.replace(
        linked,
        third=dataclasses.replace(linked.third, record_hash=compute_record_hash(linked)),
    )


def append_record(chain: LedgerChain, record: TripleEntryRecord) -> LedgerChain:
    """
    Append a record to the chain tail.

    Args:
        chain: Chain to extend; it is not modified.
        record: Record to seal and append. Any hash fields it carries are
            overwritten.

    Returns:
        New chain with the sealed record at the end.

    Raises:
        DuplicateReferenceKey: If the reference key is already in the chain.
        UnbalancedRecord: If debits and credits differ.
        CurrencyMismatch: If legs mix currencies.
        ReadOnlyView: If the chain is a party view.
    """
    if chain.is_view:
        raise ReadOnlyView(f"chain view for {chain.owner!r} is read-only")
    if record.reference_key in chain.reference_keys:
        raise DuplicateReferenceKey(
            f"reference key {record.reference_key!r} already in chain"
        )
    check = balance_check(record)
    if not check.passed:
        raise UnbalancedRecord(
            f"record {record.reference_key!r} is unbalanced by {check.imbalance} minor units"
        )

    sealed = seal_record(record, chain.tail_hash)
    logger.debug(f"Appended {sealed.reference_key} -> {sealed.record_hash[:12]}")
    return LedgerChain(records=chain.records + (sealed,), owner=chain.owner)


def build_chain(records, owner: str = "shared") -> LedgerChain:
    """Append records one after another onto an empty chain."""
    chain = LedgerChain(owner=owner)
    for record in records:
        chain = append_record(chain, record)
    return chain


def verify_chain(chain: LedgerChain) -> ChainVerification:
    """
    Recompute every hash and link of a chain.

    Failures are reported, never raised. Party views are checked record by
    record only, since they skip records of the underlying chain.

    Returns:
        ChainVerification with the first failing index and its reason.
    """
    expected_prev = GENESIS_HASH
    seen = set()
    for index, record in enumerate(chain.records):
        try:
            recomputed = compute_record_hash(record)
        except InvalidRecord as e:
            return ChainVerification(False, index, f"invalid record: {e}")
        if recomputed != record.record_hash:
            return ChainVerification(False, index, "hash mismatch")
        if not chain.is_view and record.third.prev_record_hash != expected_prev:
            return ChainVerification(False, index, "broken link")
        if record.reference_key in seen:
            return ChainVerification(False, index, "duplicate reference key")
        seen.add(record.reference_key)
        expected_prev = record.record_hash
    return ChainVerification(True)


def derive_party_view(chain: LedgerChain, party: str) -> LedgerChain:
    """Records in which the party is sender or receiver, in chain order."""
    records = tuple(
        r
        for r in chain.records
        if party in (r.metadata.party_from, r.metadata.party_to)
    )
    return LedgerChain(records=records, owner=party, is_view=True)


def ledger_totals(chain: LedgerChain) -> Dict[str, Dict[str, int]]:
    """
    Signed balance per account, grouped by currency.

    Debits count positive, credits negative, so each currency's balances sum
    to zero for a chain of balanced records.
    """
    totals: Dict[str, Dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for record in chain.records:
        for leg in record.debits:
            totals[leg.amount.currency][leg.account] += leg.amount.minor_units
        for leg in record.credits:
            totals[leg.amount.currency][leg.account] -= leg.amount.minor_units
    return {
        currency: dict(sorted(accounts.items()))
        for currency, accounts in sorted(totals.items())
    }
