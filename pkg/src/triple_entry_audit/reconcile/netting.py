"""Bilateral netting of obligations recorded between two parties."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from ..ledger import CurrencyMismatch, LedgerChain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NettingResult:
    party_a: str
    party_b: str
    currency: Optional[str]
    gross_a_to_b: int
    gross_b_to_a: int
    net_amount: int
    net_payer: Optional[str]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "currency": self.currency,
            "gross_a_to_b": self.gross_a_to_b,
            "gross_b_to_a": self.gross_b_to_a,
            "net_amount": self.net_amount,
            "net_payer": self.net_payer,
            "party_a": self.party_a,
            "party_b": self.party_b,
        }


def net_bilateral(chain: LedgerChain, party_a: str, party_b: str) -> NettingResult:
    """
    Offset obligations between two parties into one net payment.

    Each record from X to Y counts as an obligation of X towards Y for the
    record amount.

    Raises:
        CurrencyMismatch: If the records between the parties use more than
            one currency.
    """
    gross_ab = 0
    gross_ba = 0
    currencies = set()
    for record in chain.records:
        sender, receiver = record.metadata.party_from, record.metadata.party_to
        if (sender, receiver) == (party_a, party_b):
            gross_ab += record.amount
        elif (sender, receiver) == (party_b, party_a):
            gross_ba += record.amount
        else:
            continue
        currencies.add(record.currency)

    if len(currencies) > 1:
        raise CurrencyMismatch(
            f"obligations between {party_a} and {party_b} span {sorted(currencies)}"
        )

    net = gross_ab - gross_ba
    payer = party_a if net > 0 else party_b if net < 0 else None
    logger.info(
        f"Netting {party_a}<->{party_b}: {gross_ab} vs {gross_ba}, net {abs(net)} paid by {payer}"
    )
    return NettingResult(
        party_a=party_a,
        party_b=party_b,
        currency=currencies.pop() if currencies else None,
        gross_a_to_b=gross_ab,
        gross_b_to_a=gross_ba,
        net_amount=abs(net),
        net_payer=payer,
    )
