"""
Frequent-itemset mining: level-wise Apriori and depth-first ECLAT.

Both return the same mapping of itemset to support count for the same
database and threshold.
"""

import logging
import math
from itertools import combinations
from typing import Dict, FrozenSet, List, Tuple

from ..errors import TripleEntryError
from .transactions import Itemset, TransactionDB

logger = logging.getLogger(__name__)


class SupportOutOfRange(TripleEntryError):
    """Raised when min_support is not in (0, 1]."""

    pass


def min_support_count(min_support: float, n_transactions: int) -> int:
    """
    Smallest count meeting a fractional support threshold.

    Raises:
        SupportOutOfRange: Unless 0 < min_support <= 1.
    """
    if not 0 < min_support <= 1:
        raise SupportOutOfRange(f"min_support must be in (0, 1], got {min_support}")
    # epsilon keeps 2/3 * 3 at 2 despite float rounding
    return max(1, math.ceil(min_support * n_transactions - 1e-9))


def frequent_itemsets_apriori(db: TransactionDB, min_support: float) -> Dict[Itemset, int]:
    """
    Level-wise candidate generation with downward-closure pruning.

    Args:
        db: Transaction database.
        min_support: Fraction of transactions an itemset must appear in.

    Returns:
        Every itemset whose count is at least ceil(min_support * |db|).
    """
    threshold = min_support_count(min_support, len(db))
    if len(db) == 0:
        return {}

    counts: Dict[str, int] = {}
    for transaction in db.transactions:
        for item in transaction:
            counts[item] = counts.get(item, 0) + 1
    level: Dict[Tuple[str, ...], int] = {
        (item,): c for item, c in counts.items() if c >= threshold
    }
    frequent: Dict[Itemset, int] = {frozenset(k): c for k, c in level.items()}

    size = 1
    while level:
        size += 1
        previous = sorted(level)
        known = set(previous)
        candidates: List[Tuple[str, ...]] = []
        for i, a in enumerate(previous):
            for b in previous[i + 1 :]:
                if a[:-1] != b[:-1]:
                    break
                candidate = a + (b[-1],)
                if all(sub in known for sub in combinations(candidate, size - 1)):
                    candidates.append(candidate)

        candidate_counts = dict.fromkeys(candidates, 0)
        for transaction in db.transactions:
            if len(transaction) < size:
                continue
            for candidate in candidates:
                if transaction.issuperset(candidate):
                    candidate_counts[candidate] += 1

        level = {k: c for k, c in candidate_counts.items() if c >= threshold}
        frequent.update({frozenset(k): c for k, c in level.items()})
        logger.debug(f"Apriori level {size}: {len(candidates)} candidates, {len(level)} frequent")

    logger.info(f"Apriori found {len(frequent)} frequent itemsets (min count {threshold})")
    return frequent


def frequent_itemsets_eclat(db: TransactionDB, min_support: float) -> Dict[Itemset, int]:
    """
    Depth-first search over equivalence classes of tid-list intersections.

    Same contract as frequent_itemsets_apriori.
    """
    threshold = min_support_count(min_support, len(db))
    if len(db) == 0:
        return {}

    frequent: Dict[Itemset, int] = {}

    def extend(prefix: Tuple[str, ...], suffixes: List[Tuple[str, FrozenSet[int]]]) -> None:
        for i, (item, tids) in enumerate(suffixes):
            itemset = prefix + (item,)
            frequent[frozenset(itemset)] = len(tids)
            siblings = []
            for other, other_tids in suffixes[i + 1 :]:
                common = tids & other_tids
                if len(common) >= threshold:
                    siblings.append((other, common))
            if siblings:
                extend(itemset, siblings)

    roots = sorted(
        (item, tids) for item, tids in db.tid_lists().items() if len(tids) >= threshold
    )
    extend((), roots)
    logger.info(f"ECLAT found {len(frequent)} frequent itemsets (min count {threshold})")
    return frequent
