"""
Seeded synthetic ledgers.

generate_fraud_ledger builds the anomaly-detection benchmark: routine
payments in business hours with a small share of injected anomalies at ten
times the usual amount, booked off-hours. mirrored_party_chains builds two
party ledgers that record the same events from each side.
"""

import logging
from datetime import datetime, timedelta, timezone
from typing import List, Tuple

import numpy as np

from .ledger import ContextMetadata, LedgerChain, build_chain, simple_record
from .ledger.records import TripleEntryRecord

logger = logging.getLogger(__name__)

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

PAYERS = ["P01", "P02", "P03", "P04", "P05", "P06"]
MERCHANTS = ["M01", "M02", "M03"]
LOCATIONS = ["CHI", "LA", "NY", "SF"]
ITEMS = [
    "office supplies",
    "consulting services",
    "software license",
    "travel expenses",
    "equipment rental",
]

BASE_AMOUNT = 20_000
AMOUNT_SIGMA = 0.25
ANOMALY_SCALE = 10
ANOMALY_TAG = "anomaly"


def _timestamp(day: int, hour: int, minute: int) -> str:
    moment = EPOCH + timedelta(days=int(day), hours=int(hour), minutes=int(minute))
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def generate_fraud_ledger(
    n: int = 2000, anomaly_rate: float = 0.01, seed: int = 42
) -> Tuple[LedgerChain, np.ndarray]:
    """
    Build a payment ledger with labelled anomalies.

    Args:
        n: Number of records.
        anomaly_rate: Share of records drawn as anomalies.
        seed: Seed for every random draw.

    Returns:
        The chain and a 0/1 label vector aligned with its records. Anomalous
        records also carry the ``anomaly`` tag.
    """
    rng = np.random.default_rng(seed)
    n_anomalies = max(1, int(round(n * anomaly_rate)))
    labels = np.zeros(n, dtype=int)
    labels[rng.choice(n, size=n_anomalies, replace=False)] = 1

    records: List[TripleEntryRecord] = []
    for i in range(n):
        is_anomaly = bool(labels[i])
        payer = PAYERS[rng.integers(len(PAYERS))]
        merchant = MERCHANTS[rng.integers(len(MERCHANTS))]
        location = LOCATIONS[rng.integers(len(LOCATIONS))]
        item = ITEMS[rng.integers(len(ITEMS))]
        scale = BASE_AMOUNT * (ANOMALY_SCALE if is_anomaly else 1)
        amount = max(1, int(round(scale * rng.lognormal(0.0, AMOUNT_SIGMA))))
        day = rng.integers(0, 90)
        hour = rng.integers(0, 5) if is_anomaly else rng.integers(9, 18)
        minute = rng.integers(0, 60)

        metadata = ContextMetadata(
            party_from=payer,
            party_to=merchant,
            occurred_at=_timestamp(day, hour, minute),
            location=location,
            item_description=item,
            tags=frozenset({ANOMALY_TAG}) if is_anomaly else frozenset(),
        )
        records.append(
            simple_record(f"TX{i:05d}", "expenses", "cash", amount, "USD", metadata)
        )

    logger.info(f"Generated fraud ledger: {n} records, {n_anomalies} anomalies")
    return build_chain(records, owner="shared"), labels


def mirrored_pair(
    reference_key: str,
    sender: str,
    receiver: str,
    amount: int,
    metadata: ContextMetadata,
    currency: str = "USD",
) -> Tuple[TripleEntryRecord, TripleEntryRecord]:
    """
    The same transfer as booked by the sender and by the receiver.

    The sender debits an outgoing-transfer account against cash; the
    receiver debits cash against an incoming-transfer account.
    """
    sender_record = simple_record(
        reference_key, f"transfers_out:{receiver}", "cash", amount, currency, metadata
    )
    receiver_record = simple_record(
        reference_key, "cash", f"transfers_in:{sender}", amount, currency, metadata
    )
    return sender_record, receiver_record


def mirrored_party_chains(
    n: int = 200, seed: int = 7, party_a: str = "A", party_b: str = "B"
) -> Tuple[LedgerChain, LedgerChain]:
    """
    Two party ledgers recording the same n transfers between the parties.

    Returns:
        (chain of party_a, chain of party_b) with identical reference keys.
    """
    rng = np.random.default_rng(seed)
    records_a: List[TripleEntryRecord] = []
    records_b: List[TripleEntryRecord] = []
    for i in range(n):
        a_sends = bool(rng.integers(2))
        sender, receiver = (party_a, party_b) if a_sends else (party_b, party_a)
        amount = int(rng.integers(1_000, 100_000))
        metadata = ContextMetadata(
            party_from=sender,
            party_to=receiver,
            occurred_at=_timestamp(i // 24, i % 24, 0),
            location=LOCATIONS[rng.integers(len(LOCATIONS))],
            item_description=ITEMS[rng.integers(len(ITEMS))],
        )
        sender_record, receiver_record = mirrored_pair(
            f"T{i:05d}", sender, receiver, amount, metadata
        )
        if a_sends:
            records_a.append(sender_record)
            records_b.append(receiver_record)
        else:
            records_a.append(receiver_record)
            records_b.append(sender_record)

    return build_chain(records_a, owner=party_a), build_chain(records_b, owner=party_b)
