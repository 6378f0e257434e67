"""
Association-rule mining over ledger metadata.
"""

from .itemsets import (
    SupportOutOfRange,
    frequent_itemsets_apriori,
    frequent_itemsets_eclat,
    min_support_count,
)
from .rules import AssociationRule, NotDownwardClosed, generate_rules, rules_to_json
from .transactions import DEFAULT_ITEM_FIELDS, TransactionDB, build_transaction_db

__all__ = [
    "DEFAULT_ITEM_FIELDS",
    "AssociationRule",
    "NotDownwardClosed",
    "SupportOutOfRange",
    "TransactionDB",
    "build_transaction_db",
    "frequent_itemsets_apriori",
    "frequent_itemsets_eclat",
    "generate_rules",
    "min_support_count",
    "rules_to_json",
]
