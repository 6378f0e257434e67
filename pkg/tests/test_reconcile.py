"""
Tests for cross-ledger reconciliation, bilateral netting and settlement rules.
"""

import json

import pytest

from triple_entry_audit.ledger import (
    CurrencyMismatch,
    LedgerChain,
    append_record,
    build_chain,
    simple_record,
    verify_chain,
)
from triple_entry_audit.reconcile import (
    DuplicateKeyWithinChain,
    InvalidRule,
    MatchStatus,
    RuleTemplateUnbalanced,
    SettlementRule,
    evaluate_settlement_rules,
    match_by_reference_key,
    net_bilateral,
    reconcile,
    reconciliation_report_to_json,
)
from triple_entry_audit.synthetic import mirrored_party_chains


def _with_amount(record, amount):
    return simple_record(
        record.reference_key,
        record.debits[0].account,
        record.credits[0].account,
        amount,
        record.currency,
        record.metadata,
    )


class TestReconcile:
    """Test suite for match_by_reference_key and reconcile."""

    @pytest.fixture
    def pair(self, make_record):
        a = build_chain(
            [
                make_record("K1", 100, location="NY"),
                make_record("K2", 200, location="NY"),
                make_record("K3", 300, location="NY"),
                make_record("K4", 400),
            ],
            owner="A",
        )
        b = build_chain(
            [
                make_record("K5", 500),
                make_record("K3", 300, location="SF"),
                make_record("K2", 250, location="NY"),
                make_record("K1", 100),
            ],
            owner="B",
        )
        return a, b

    def test_pairs_and_leftovers(self, pair):
        """Test that pairs follow chain a and leftovers are labelled by owner."""
        a, b = pair
        match = match_by_reference_key(a, b)
        assert [key for key, _, _ in match.pairs] == ["K1", "K2", "K3"]
        assert match.leftovers == [("K4", "A"), ("K5", "B")]

    def test_statuses(self, pair):
        """Test amount mismatch, metadata divergence and one-sided fields."""
        report = reconcile(*pair)
        by_key = {entry.reference_key: entry for entry in report.matched}
        # location only on a's side: not a divergence
        assert by_key["K1"].status == MatchStatus.CONSISTENT
        assert by_key["K2"].status == MatchStatus.AMOUNT_MISMATCH
        assert by_key["K2"].difference == -50
        assert by_key["K3"].status == MatchStatus.METADATA_DIVERGENCE
        assert by_key["K3"].fields == ("location",)
        assert report.counts() == {
            "consistent": 1,
            "amount_mismatch": 1,
            "metadata_divergence": 1,
            "unmatched": 2,
        }

    def test_swapped_inputs_negate_differences(self, pair):
        """Test that swapping the chains keeps statuses and flips signs."""
        a, b = pair
        forward = {e.reference_key: e for e in reconcile(a, b).matched}
        backward = {e.reference_key: e for e in reconcile(b, a).matched}
        assert forward.keys() == backward.keys()
        for key, entry in forward.items():
            assert backward[key].status == entry.status
            assert backward[key].fields == entry.fields
            if entry.difference is not None:
                assert backward[key].difference == -entry.difference

        forward_unmatched = {(u.reference_key, u.present_in) for u in reconcile(a, b).unmatched}
        backward_unmatched = {(u.reference_key, u.present_in) for u in reconcile(b, a).unmatched}
        assert forward_unmatched == backward_unmatched

    def test_identical_chains_fully_consistent(self, make_record):
        """Test that a chain reconciled against itself is all consistent."""
        chain = build_chain([make_record(f"K{i}", 10 + i) for i in range(6)])
        report = reconcile(chain, chain)
        assert report.counts()["consistent"] == 6
        assert report.unmatched == []
        assert (report.party_a, report.party_b) == ("a", "b")

    def test_duplicate_key_within_chain(self, make_record):
        """Test that a repeated key inside one input is refused."""
        record = make_record("K1")
        broken = LedgerChain(records=(record, record), owner="A")
        with pytest.raises(DuplicateKeyWithinChain):
            reconcile(broken, LedgerChain(owner="B"))

    def test_report_json_document(self, pair):
        """Test the serialized report's layout."""
        document = json.loads(reconciliation_report_to_json(reconcile(*pair)))
        assert set(document) == {"counts", "matched", "party_a", "party_b", "unmatched"}
        assert document["matched"][1] == {
            "difference": -50,
            "fields": [],
            "reference_key": "K2",
            "status": "amount_mismatch",
        }
        assert document["unmatched"][0] == {"present_in": "A", "reference_key": "K4"}

    def test_mirrored_chains_reconcile_cleanly(self):
        """Test that sender and receiver books of the same transfers agree."""
        a, b = mirrored_party_chains(n=50, seed=1)
        report = reconcile(a, b)
        assert report.counts()["consistent"] == 50


class TestNetting:
    """Test suite for net_bilateral."""

    def test_net_amount_and_payer(self, make_record):
        """Test offsetting obligations in both directions."""
        chain = build_chain(
            [
                make_record("T1", 700, "A", "B"),
                make_record("T2", 200, "B", "A"),
                make_record("T3", 50, "A", "B"),
                make_record("T4", 999, "A", "C"),
            ]
        )
        result = net_bilateral(chain, "A", "B")
        assert (result.gross_a_to_b, result.gross_b_to_a) == (750, 200)
        assert result.net_amount == 550
        assert result.net_payer == "A"
        assert result.currency == "USD"

    def test_even_obligations_have_no_payer(self, make_record):
        """Test that equal obligations net to zero."""
        chain = build_chain([make_record("T1", 300, "A", "B"), make_record("T2", 300, "B", "A")])
        result = net_bilateral(chain, "B", "A")
        assert result.net_amount == 0
        assert result.net_payer is None

    def test_mixed_currencies_refused(self, make_record):
        """Test that netting never mixes currencies."""
        chain = build_chain(
            [make_record("T1", 300, "A", "B"), make_record("T2", 100, "B", "A", currency="EUR")]
        )
        with pytest.raises(CurrencyMismatch):
            net_bilateral(chain, "A", "B")


class TestSettlementRules:
    """Test suite for conditional settlement rules."""

    @pytest.fixture
    def fee_rule(self):
        return SettlementRule.from_dict(
            {
                "rule_id": "fee",
                "conditions": [
                    {"kind": "tag_present", "value": "card"},
                    {"kind": "field_equals", "field": "location", "value": "NY"},
                ],
                "action": {
                    "debit_legs": [["fees", 1]],
                    "credit_legs": [["cash", 1]],
                    "amount_kind": "share_of_trigger",
                    "amount_value": 250,
                    "payer_field": "party_from",
                    "payee_field": "party_to",
                },
            }
        )

    @pytest.fixture
    def chain(self, make_record):
        return build_chain(
            [
                make_record("T1", 10_000, tags=frozenset({"card"}), location="NY"),
                make_record("T2", 10_000, tags=frozenset({"card"}), location="SF"),
                make_record("T3", 4_000, location="NY"),
                make_record("T4", 2_000, tags=frozenset({"card"}), location="NY"),
            ]
        )

    def test_rule_fires_on_matching_records(self, fee_rule, chain):
        """Test that only records meeting every clause trigger settlement."""
        emitted = evaluate_settlement_rules(chain, [fee_rule])
        assert [r.reference_key for r in emitted] == ["fee:T1", "fee:T4"]
        assert [r.amount for r in emitted] == [250, 50]
        first = emitted[0]
        assert "settlement" in first.metadata.tags
        assert "settles:fee:T1" in first.metadata.tags
        assert (first.metadata.party_from, first.metadata.party_to) == ("A", "B")

    def test_emitted_records_append_and_do_not_refire(self, fee_rule, chain):
        """Test idempotence once settlements are on the chain."""
        for record in evaluate_settlement_rules(chain, [fee_rule]):
            chain = append_record(chain, record)
        assert verify_chain(chain).ok
        assert evaluate_settlement_rules(chain, [fee_rule]) == []

    def test_weighted_split(self, chain):
        """Test that weighted legs split the amount and stay balanced."""
        rule = SettlementRule.from_dict(
            {
                "rule_id": "split",
                "conditions": [{"kind": "tag_present", "value": "card"}],
                "action": {
                    "debit_legs": [["fees:a", 1], ["fees:b", 2]],
                    "credit_legs": [["cash", 3]],
                    "amount_kind": "fixed",
                    "amount_value": 100,
                },
            }
        )
        record = evaluate_settlement_rules(chain, [rule])[0]
        assert [leg.amount.minor_units for leg in record.debits] == [34, 66]
        assert record.credits[0].amount.minor_units == 100

    def test_unbalanced_template_rejected(self, chain):
        """Test that templates with unequal weights are refused."""
        rule = SettlementRule.from_dict(
            {
                "rule_id": "bad",
                "conditions": [{"kind": "tag_present", "value": "card"}],
                "action": {"debit_legs": [["fees", 2]], "credit_legs": [["cash", 1]]},
            }
        )
        with pytest.raises(RuleTemplateUnbalanced):
            evaluate_settlement_rules(chain, [rule])

    def test_undeclared_field_rejected(self, chain):
        """Test that clauses may only read declared fields."""
        rule = SettlementRule.from_dict(
            {
                "rule_id": "bad",
                "conditions": [{"kind": "field_equals", "field": "amount", "value": "5"}],
                "action": {"debit_legs": [["fees", 1]], "credit_legs": [["cash", 1]]},
            }
        )
        with pytest.raises(InvalidRule):
            evaluate_settlement_rules(chain, [rule])


def test_injected_amount_mismatches_are_all_found():
    """Test reconciliation recall and precision over injected mismatches."""
    a, b = mirrored_party_chains(n=200, seed=11)
    for k in (1, 7, 20):
        victims = {f"T{i:05d}" for i in range(3, 200, 200 // k)[:k]}
        records = [
            _with_amount(r, r.amount + 1) if r.reference_key in victims else r for r in b.records
        ]
        report = reconcile(a, build_chain(records, owner="B"))
        assert set(report.keys_with_status(MatchStatus.AMOUNT_MISMATCH)) == victims
        assert report.counts()["consistent"] == 200 - k
