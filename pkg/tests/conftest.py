"""
Shared fixtures for the triple-entry audit test suite.
"""

import tempfile
from pathlib import Path

import pytest

from triple_entry_audit.ledger import (
    ContextMetadata,
    build_chain,
    simple_record,
)


@pytest.fixture
def temp_dir():
    """Create a temporary working directory."""
    with tempfile.TemporaryDirectory() as directory:
        yield Path(directory)


@pytest.fixture
def make_record():
    """Factory for unsealed one-debit, one-credit records."""

    def factory(
        key="T1",
        amount=500,
        party_from="A",
        party_to="B",
        occurred_at="2024-03-01T12:00:00Z",
        debit="expenses",
        credit="cash",
        currency="USD",
        **metadata,
    ):
        meta = ContextMetadata(
            party_from=party_from,
            party_to=party_to,
            occurred_at=occurred_at,
            **metadata,
        )
        return simple_record(key, debit, credit, amount, currency, meta)

    return factory


@pytest.fixture
def three_party_chain(make_record):
    """Chain with an A->B, a B->C and a C->A record."""
    return build_chain(
        [
            make_record("T1", 500, "A", "B", location="NY"),
            make_record("T2", 300, "B", "C", location="SF"),
            make_record("T3", 200, "C", "A", location="NY"),
        ],
        owner="shared",
    )
