"""
Tests for transaction databases, frequent itemsets and association rules.
"""

from itertools import combinations

import numpy as np
import pytest

from triple_entry_audit.errors import TripleEntryError
from triple_entry_audit.mining import (
    NotDownwardClosed,
    SupportOutOfRange,
    TransactionDB,
    build_transaction_db,
    frequent_itemsets_apriori,
    frequent_itemsets_eclat,
    generate_rules,
    min_support_count,
)


def _exhaustive_itemsets(db, min_support):
    threshold = min_support_count(min_support, len(db))
    items = db.items
    found = {}
    for size in range(1, len(items) + 1):
        level_hit = False
        for candidate in combinations(items, size):
            count = db.count(candidate)
            if count >= threshold:
                found[frozenset(candidate)] = count
                level_hit = True
        if not level_hit:
            break
    return found


def _random_db(rng):
    n_items = int(rng.integers(1, 13))
    n_transactions = int(rng.integers(1, 41))
    items = [f"i{j:02d}" for j in range(n_items)]
    density = rng.uniform(0.1, 0.6)
    return TransactionDB(
        transactions=[
            {item for item in items if rng.random() < density} for _ in range(n_transactions)
        ]
    )


class TestFrequentItemsets:
    """Test suite for Apriori and ECLAT."""

    @pytest.fixture
    def db(self):
        return TransactionDB(
            transactions=[
                {"bread", "milk"},
                {"bread", "diaper", "beer", "eggs"},
                {"milk", "diaper", "beer", "cola"},
                {"bread", "milk", "diaper", "beer"},
                {"bread", "milk", "diaper", "cola"},
            ]
        )

    def test_known_counts(self, db):
        """Test a small textbook database at 60% support."""
        frequent = frequent_itemsets_apriori(db, 0.6)
        assert frequent[frozenset({"bread"})] == 4
        assert frequent[frozenset({"diaper", "beer"})] == 3
        assert frozenset({"cola"}) not in frequent
        assert frequent == frequent_itemsets_eclat(db, 0.6)

    def test_algorithms_agree_with_exhaustive_search(self):
        """Test Apriori = ECLAT = brute force over random databases."""
        rng = np.random.default_rng(17)
        for _ in range(200):
            db = _random_db(rng)
            min_support = float(rng.choice([0.05, 0.1, 0.2, 0.3, 0.5]))
            expected = _exhaustive_itemsets(db, min_support)
            assert frequent_itemsets_apriori(db, min_support) == expected
            assert frequent_itemsets_eclat(db, min_support) == expected

    def test_downward_closed(self, db):
        """Test that every subset of a frequent itemset is frequent."""
        frequent = frequent_itemsets_eclat(db, 0.4)
        for itemset in frequent:
            for size in range(1, len(itemset)):
                for subset in combinations(sorted(itemset), size):
                    assert frozenset(subset) in frequent

    def test_lower_support_finds_more(self, db):
        """Test monotonicity in the support threshold."""
        strict = set(frequent_itemsets_apriori(db, 0.6))
        loose = set(frequent_itemsets_apriori(db, 0.4))
        assert strict <= loose

    def test_min_support_count(self):
        """Test the ceiling conversion of a fractional support."""
        assert min_support_count(2 / 3, 3) == 2
        assert min_support_count(0.01, 50) == 1
        assert min_support_count(0.5, 5) == 3
        with pytest.raises(SupportOutOfRange):
            min_support_count(0.0, 10)
        with pytest.raises(SupportOutOfRange):
            min_support_count(1.5, 10)

    def test_empty_database(self):
        """Test that nothing is frequent in an empty database."""
        assert frequent_itemsets_apriori(TransactionDB(transactions=[]), 0.5) == {}
        assert frequent_itemsets_eclat(TransactionDB(transactions=[]), 0.5) == {}


class TestAssociationRules:
    """Test suite for generate_rules."""

    @pytest.fixture
    def frequent(self):
        return {
            frozenset({"a"}): 4,
            frozenset({"b"}): 3,
            frozenset({"c"}): 2,
            frozenset({"a", "b"}): 3,
            frozenset({"a", "c"}): 2,
        }

    def test_rule_measures(self, frequent):
        """Test support, confidence and lift of generated rules."""
        rules = generate_rules(frequent, db_size=5, min_confidence=0.0)
        by_pair = {(tuple(sorted(r.antecedent)), tuple(sorted(r.consequent))): r for r in rules}
        rule = by_pair[(("b",), ("a",))]
        assert rule.support == pytest.approx(0.6)
        assert rule.confidence == pytest.approx(1.0)
        assert rule.lift == pytest.approx(1.0 / 0.8)
        assert by_pair[(("a",), ("b",))].confidence == pytest.approx(0.75)

    def test_ordering(self, frequent):
        """Test support-descending order with lexicographic ties."""
        rules = generate_rules(frequent, db_size=5, min_confidence=0.0)
        described = [(sorted(r.antecedent), sorted(r.consequent)) for r in rules]
        assert described == [
            (["a"], ["b"]),
            (["b"], ["a"]),
            (["a"], ["c"]),
            (["c"], ["a"]),
        ]

    def test_confidence_filter(self, frequent):
        """Test that low-confidence rules are dropped."""
        rules = generate_rules(frequent, db_size=5, min_confidence=0.9)
        assert {(min(r.antecedent), min(r.consequent)) for r in rules} == {("b", "a"), ("c", "a")}

    def test_not_downward_closed(self):
        """Test that a missing subset is reported."""
        with pytest.raises(NotDownwardClosed):
            generate_rules({frozenset({"a", "b"}): 2, frozenset({"a"}): 3}, db_size=5)


class TestTransactionDB:
    """Test suite for build_transaction_db."""

    def test_items_from_records(self, make_record):
        """Test field=value items, tag items and skipped empty fields."""
        records = [
            make_record("T1", location="NY", tags=frozenset({"card"})),
            make_record("T2", party_from="C"),
        ]
        db = build_transaction_db(records)
        assert db.keys == ["T1", "T2"]
        assert db.transactions[0] == frozenset(
            {"party_from=A", "party_to=B", "location=NY", "currency=USD", "tag=card"}
        )
        assert "location=None" not in " ".join(db.transactions[1])
        assert db.count({"party_to=B"}) == 2

    def test_unknown_field(self, make_record):
        """Test that item fields must be record columns."""
        with pytest.raises(TripleEntryError):
            build_transaction_db([make_record()], fields=["colour"])
