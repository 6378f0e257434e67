"""
Association rules from frequent itemsets.
"""

import json
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, List, Mapping

from .. import config as defaults
from ..errors import TripleEntryError
from .transactions import Itemset

logger = logging.getLogger(__name__)


class NotDownwardClosed(TripleEntryError):
    """Raised when a frequent-itemset mapping is missing a subset of a listed itemset."""

    pass


@dataclass(frozen=True)
class AssociationRule:
    antecedent: Itemset
    consequent: Itemset
    support: float
    confidence: float
    lift: float
    count: int

    def sort_key(self):
        return (-self.support, tuple(sorted(self.antecedent)), tuple(sorted(self.consequent)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "antecedent": sorted(self.antecedent),
            "confidence": self.confidence,
            "consequent": sorted(self.consequent),
            "count": self.count,
            "lift": self.lift,
            "support": self.support,
        }


def generate_rules(
    frequent: Mapping[Itemset, int],
    db_size: int,
    min_confidence: float = defaults.MIN_CONFIDENCE,
) -> List[AssociationRule]:
    """
    Every rule X -> Y with X ∪ Y frequent and confidence >= min_confidence.

    Rules are ordered by support (descending), then by sorted antecedent and
    sorted consequent.

    Raises:
        NotDownwardClosed: If some subset of a listed itemset is missing.
    """
    if not 0 <= min_confidence <= 1:
        raise TripleEntryError(f"min_confidence must be in [0, 1], got {min_confidence}")
    frequent = {frozenset(k): v for k, v in frequent.items()}
    rules: List[AssociationRule] = []
    if db_size <= 0:
        return rules

    for itemset, count in frequent.items():
        if len(itemset) < 2:
            continue
        members = sorted(itemset)
        for size in range(1, len(members)):
            for antecedent in combinations(members, size):
                antecedent = frozenset(antecedent)
                consequent = itemset - antecedent
                if antecedent not in frequent or consequent not in frequent:
                    missing = sorted(antecedent if antecedent not in frequent else consequent)
                    raise NotDownwardClosed(f"subset {missing} of {members} is not listed")
                confidence = count / frequent[antecedent]
                if confidence < min_confidence:
                    continue
                rules.append(
                    AssociationRule(
                        antecedent=antecedent,
                        consequent=consequent,
                        support=count / db_size,
                        confidence=confidence,
                        lift=confidence / (frequent[consequent] / db_size),
                        count=count,
                    )
                )

    rules.sort(key=AssociationRule.sort_key)
    logger.info(f"Generated {len(rules)} rules at min confidence {min_confidence}")
    return rules


def rules_to_json(rules: List[AssociationRule]) -> str:
    return json.dumps([rule.to_dict() for rule in rules], sort_keys=True, indent=2)
