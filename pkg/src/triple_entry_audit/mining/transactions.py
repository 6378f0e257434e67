"""
Transaction databases of canonical ``field=value`` items.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence

import pandas as pd

from ..errors import TripleEntryError
from ..ledger import TripleEntryRecord
from ..feature_engineering import records_to_frame

logger = logging.getLogger(__name__)

Itemset = FrozenSet[str]

DEFAULT_ITEM_FIELDS = ("party_from", "party_to", "location", "currency", "item_description")
TAG_ITEM_PREFIX = "tag="


@dataclass
class TransactionDB:
    """Ordered list of item sets; transaction ids are list positions."""

    transactions: List[Itemset]
    keys: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.transactions = [frozenset(t) for t in self.transactions]

    def __len__(self) -> int:
        return len(self.transactions)

    @property
    def items(self) -> List[str]:
        return sorted({item for t in self.transactions for item in t})

    def tid_lists(self) -> Dict[str, FrozenSet[int]]:
        """Vertical layout: item -> ids of transactions containing it."""
        tids: Dict[str, set] = {}
        for tid, transaction in enumerate(self.transactions):
            for item in transaction:
                tids.setdefault(item, set()).add(tid)
        return {item: frozenset(ids) for item, ids in tids.items()}

    def count(self, itemset: Iterable[str]) -> int:
        itemset = frozenset(itemset)
        return sum(1 for t in self.transactions if itemset <= t)


def build_transaction_db(
    records: Iterable[TripleEntryRecord], fields: Optional[Sequence[str]] = None
) -> TransactionDB:
    """
    One transaction per record: ``field=value`` for each non-empty field
    plus ``tag=<t>`` for every tag.
    """
    fields = list(fields or DEFAULT_ITEM_FIELDS)
    frame = records_to_frame(records)
    unknown = [name for name in fields if name not in frame.columns or name == "tags"]
    if unknown:
        raise TripleEntryError(f"cannot build items from fields {unknown}")

    transactions: List[Itemset] = []
    for _, row in frame.iterrows():
        items = {f"{name}={row[name]}" for name in fields if not pd.isna(row[name])}
        items.update(f"{TAG_ITEM_PREFIX}{tag}" for tag in row["tags"])
        transactions.append(frozenset(items))

    db = TransactionDB(transactions=transactions, keys=frame["reference_key"].tolist())
    logger.info(f"Built transaction database: {len(db):,} transactions, {len(db.items)} items")
    return db
