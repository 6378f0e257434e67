"""Simulated multi-party audits: secret sharing, secure sums, attestations."""

from .audit import (
    PREDICATES,
    Attestation,
    AuditPredicate,
    AuditTranscript,
    LinkageResult,
    UnknownPredicate,
    emit_attestation,
    find_attestation,
    parse_predicate,
    private_record_linkage,
    run_compliance_audit,
    verify_attestation,
)
from .field import P, FieldElement, MagnitudeTooLarge, NotInField, decode_amount, encode_amount
from .sharing import (
    IncompleteShareSet,
    Message,
    MixedSessions,
    SecretShare,
    SecureSumRun,
    additive_split,
    reconstruct_secret,
    run_secure_sum,
    secure_sum,
    share_secret,
)

__all__ = [
    "P",
    "PREDICATES",
    "Attestation",
    "AuditPredicate",
    "AuditTranscript",
    "FieldElement",
    "IncompleteShareSet",
    "LinkageResult",
    "MagnitudeTooLarge",
    "Message",
    "MixedSessions",
    "NotInField",
    "SecretShare",
    "SecureSumRun",
    "UnknownPredicate",
    "additive_split",
    "decode_amount",
    "emit_attestation",
    "encode_amount",
    "find_attestation",
    "parse_predicate",
    "private_record_linkage",
    "reconstruct_secret",
    "run_compliance_audit",
    "run_secure_sum",
    "secure_sum",
    "share_secret",
    "verify_attestation",
]
