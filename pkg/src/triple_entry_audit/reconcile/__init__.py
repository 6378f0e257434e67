"""Ingestion, cross-ledger reconciliation, settlement rules and bilateral netting."""

from .ingest import (
    IngestMapping,
    IngestReport,
    MappingIncomplete,
    SourceUnreadable,
    ingest_records,
    parse_amount,
)
from .matching import (
    DuplicateKeyWithinChain,
    MatchedEntry,
    MatchResult,
    MatchStatus,
    ReconciliationReport,
    UnmatchedEntry,
    match_by_reference_key,
    reconcile,
    reconciliation_report_to_json,
)
from .netting import NettingResult, net_bilateral
from .settlement import (
    Clause,
    InvalidRule,
    RuleTemplateUnbalanced,
    SettlementRule,
    SettlementTemplate,
    evaluate_settlement_rules,
    load_rules,
    settlement_tag,
)

__all__ = [
    "Clause",
    "DuplicateKeyWithinChain",
    "IngestMapping",
    "IngestReport",
    "InvalidRule",
    "MappingIncomplete",
    "MatchResult",
    "MatchStatus",
    "MatchedEntry",
    "NettingResult",
    "ReconciliationReport",
    "RuleTemplateUnbalanced",
    "SettlementRule",
    "SettlementTemplate",
    "SourceUnreadable",
    "UnmatchedEntry",
    "evaluate_settlement_rules",
    "ingest_records",
    "load_rules",
    "match_by_reference_key",
    "net_bilateral",
    "parse_amount",
    "reconcile",
    "reconciliation_report_to_json",
    "settlement_tag",
]
