"""
Flattening of triple-entry records into a pandas DataFrame.

One row per record; the columns are the raw material every encoder and the
rule-mining transaction builder read from.
"""

from typing import Iterable

import pandas as pd

from ..ledger import TripleEntryRecord, parse_timestamp

FRAME_COLUMNS = [
    "reference_key",
    "party_from",
    "party_to",
    "location",
    "currency",
    "amount",
    "leg_count",
    "occurred_at",
    "hour_of_day",
    "item_description",
    "rationale",
    "tags",
]


def records_to_frame(records: Iterable[TripleEntryRecord]) -> pd.DataFrame:
    """
    Flatten records into a frame.

    ``amount`` is the debit total in minor units, ``tags`` a sorted list and
    ``hour_of_day`` the UTC hour of ``occurred_at``.
    """
    rows = []
    for record in records:
        meta = record.metadata
        rows.append(
            {
                "reference_key": record.reference_key,
                "party_from": meta.party_from,
                "party_to": meta.party_to,
                "location": meta.location,
                "currency": record.currency,
                "amount": record.amount,
                "leg_count": len(record.debits) + len(record.credits),
                "occurred_at": meta.occurred_at,
                "hour_of_day": parse_timestamp(meta.occurred_at).hour,
                "item_description": meta.item_description,
                "rationale": meta.rationale,
                "tags": sorted(meta.tags),
            }
        )
    return pd.DataFrame(rows, columns=FRAME_COLUMNS)
