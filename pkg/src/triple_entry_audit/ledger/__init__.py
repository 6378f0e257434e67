"""Triple-entry record model, canonical hashing and the hash-chained ledger."""

from .canonical import (
    BalanceCheck,
    balance_check,
    canonical_json_bytes,
    canonicalize_record,
    compute_record_hash,
    serialize_record,
    sha256_hex,
)
from .chain import (
    ChainVerification,
    DuplicateReferenceKey,
    LedgerChain,
    ReadOnlyView,
    append_record,
    build_chain,
    derive_party_view,
    ledger_totals,
    verify_chain,
)
from .records import (
    AUDIT_ACCOUNT_PREFIX,
    GENESIS_HASH,
    ContextMetadata,
    CurrencyMismatch,
    EntryLeg,
    InvalidRecord,
    MonetaryAmount,
    ThirdEntry,
    TripleEntryRecord,
    UnbalancedRecord,
    minor_unit_digits,
    normalize_timestamp,
    parse_timestamp,
    simple_record,
)
from .storage import LedgerFileInvalid, load_chain, read_records, save_chain

__all__ = [
    "AUDIT_ACCOUNT_PREFIX",
    "GENESIS_HASH",
    "BalanceCheck",
    "ChainVerification",
    "ContextMetadata",
    "CurrencyMismatch",
    "DuplicateReferenceKey",
    "EntryLeg",
    "InvalidRecord",
    "LedgerChain",
    "LedgerFileInvalid",
    "MonetaryAmount",
    "ReadOnlyView",
    "ThirdEntry",
    "TripleEntryRecord",
    "UnbalancedRecord",
    "append_record",
    "balance_check",
    "build_chain",
    "canonical_json_bytes",
    "canonicalize_record",
    "compute_record_hash",
    "derive_party_view",
    "ledger_totals",
    "load_chain",
    "minor_unit_digits",
    "normalize_timestamp",
    "parse_timestamp",
    "read_records",
    "save_chain",
    "serialize_record",
    "sha256_hex",
    "simple_record",
    "verify_chain",
]
