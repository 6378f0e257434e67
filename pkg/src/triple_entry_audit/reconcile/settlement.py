"""
Conditional settlement rules.

A rule pairs a condition over record metadata with a settlement template.
Evaluation emits one balanced settlement record per triggering record and
rule, tagged ``settles:<rule_id>:<reference_key>`` so a later run can see
the obligation is already met and emits nothing.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Sequence, Set, Tuple, Union

from ..errors import TripleEntryError
from ..ledger import (
    ContextMetadata,
    EntryLeg,
    LedgerChain,
    MonetaryAmount,
    ThirdEntry,
    TripleEntryRecord,
)

logger = logging.getLogger(__name__)

SETTLEMENT_TAG = "settlement"
SETTLES_PREFIX = "settles:"
CONDITION_FIELDS = (
    "party_from",
    "party_to",
    "location",
    "item_description",
    "rationale",
    "currency",
)
PARTY_FIELDS = ("party_from", "party_to")
BASIS_POINTS = 10_000


class InvalidRule(TripleEntryError):
    """Raised when a rule references undeclared fields or is malformed."""

    pass


class RuleTemplateUnbalanced(TripleEntryError):
    """Raised when a settlement template's debit and credit weights differ."""

    pass


@dataclass(frozen=True)
class Clause:
    """One condition term: a tag is present, or a field equals a value."""

    kind: str
    value: str
    field: str = ""

    def validate(self) -> None:
        if self.kind == "tag_present":
            return
        if self.kind != "field_equals":
            raise InvalidRule(f"unknown clause kind {self.kind!r}")
        if self.field not in CONDITION_FIELDS:
            raise InvalidRule(
                f"clause references undeclared field {self.field!r}; "
                f"allowed: {', '.join(CONDITION_FIELDS)}"
            )

    def matches(self, record: TripleEntryRecord) -> bool:
        if self.kind == "tag_present":
            return self.value in record.metadata.tags
        if self.field == "currency":
            return record.currency == self.value
        return getattr(record.metadata, self.field) == self.value


@dataclass(frozen=True)
class SettlementTemplate:
    """
    Shape of the emitted settlement record.

    Legs carry integer weights; the settlement amount is split across each
    side in proportion to them. ``amount_kind`` is ``fixed`` (``amount_value``
    in minor units) or ``share_of_trigger`` (``amount_value`` in basis points
    of the triggering record's amount).
    """

    debit_legs: Tuple[Tuple[str, int], ...]
    credit_legs: Tuple[Tuple[str, int], ...]
    amount_kind: str = "share_of_trigger"
    amount_value: int = BASIS_POINTS
    payer_field: str = "party_to"
    payee_field: str = "party_from"

    def validate(self) -> None:
        if not self.debit_legs or not self.credit_legs:
            raise InvalidRule("template needs debit and credit legs")
        for account, weight in self.debit_legs + self.credit_legs:
            if not account or weight <= 0:
                raise InvalidRule(f"leg {account!r} needs an account and a positive weight")
        if self.amount_kind not in ("fixed", "share_of_trigger"):
            raise InvalidRule(f"unknown amount kind {self.amount_kind!r}")
        if self.amount_value <= 0:
            raise InvalidRule("template amount must be positive")
        if self.payer_field not in PARTY_FIELDS or self.payee_field not in PARTY_FIELDS:
            raise InvalidRule("payer and payee must name party_from or party_to")
        if self.payer_field == self.payee_field:
            raise InvalidRule("payer and payee must differ")
        debit_weight = sum(w for _, w in self.debit_legs)
        credit_weight = sum(w for _, w in self.credit_legs)
        if debit_weight != credit_weight:
            raise RuleTemplateUnbalanced(
                f"debit weights {debit_weight} != credit weights {credit_weight}"
            )

    def settlement_amount(self, trigger: TripleEntryRecord) -> int:
        if self.amount_kind == "fixed":
            return self.amount_value
        return trigger.amount * self.amount_value // BASIS_POINTS


@dataclass(frozen=True)
class SettlementRule:
    rule_id: str
    conditions: Tuple[Clause, ...]
    template: SettlementTemplate

    def validate(self) -> None:
        if not self.rule_id:
            raise InvalidRule("rule_id must be non-empty")
        if not self.conditions:
            raise InvalidRule(f"rule {self.rule_id!r} has no condition")
        for clause in self.conditions:
            clause.validate()
        self.template.validate()

    def applies_to(self, record: TripleEntryRecord) -> bool:
        return all(clause.matches(record) for clause in self.conditions)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SettlementRule":
        try:
            template = data["action"]
            return cls(
                rule_id=data["rule_id"],
                conditions=tuple(
                    Clause(kind=c["kind"], value=c["value"], field=c.get("field", ""))
                    for c in data["conditions"]
                ),
                template=SettlementTemplate(
                    debit_legs=tuple((a, int(w)) for a, w in template["debit_legs"]),
                    credit_legs=tuple((a, int(w)) for a, w in template["credit_legs"]),
                    amount_kind=template.get("amount_kind", "share_of_trigger"),
                    amount_value=int(template.get("amount_value", BASIS_POINTS)),
                    payer_field=template.get("payer_field", "party_to"),
                    payee_field=template.get("payee_field", "party_from"),
                ),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidRule(f"malformed rule: {e}") from e


def load_rules(path: Union[str, Path]) -> List[SettlementRule]:
    """Read a JSON array of rule objects."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidRule(f"cannot read rules {path}: {e}") from e
    return [SettlementRule.from_dict(item) for item in data]


def settlement_tag(rule_id: str, reference_key: str) -> str:
    return f"{SETTLES_PREFIX}{rule_id}:{reference_key}"


def _split(amount: int, legs: Sequence[Tuple[str, int]], currency: str) -> Tuple[EntryLeg, ...]:
    total_weight = sum(w for _, w in legs)
    shares = [amount * w // total_weight for _, w in legs]
    for i in range(amount - sum(shares)):
        shares[i % len(shares)] += 1
    return tuple(
        EntryLeg(account, MonetaryAmount(share, currency))
        for (account, _), share in zip(legs, shares)
        if share > 0
    )


def _settlement_record(rule: SettlementRule, trigger: TripleEntryRecord, amount: int) -> TripleEntryRecord:
    template = rule.template
    meta = trigger.metadata
    metadata = ContextMetadata(
        party_from=getattr(meta, template.payer_field),
        party_to=getattr(meta, template.payee_field),
        occurred_at=meta.occurred_at,
        location=meta.location,
        item_description=f"settlement of {trigger.reference_key}",
        tags=frozenset({SETTLEMENT_TAG, settlement_tag(rule.rule_id, trigger.reference_key)}),
        rationale=f"rule {rule.rule_id}",
    )
    return TripleEntryRecord(
        debits=_split(amount, template.debit_legs, trigger.currency),
        credits=_split(amount, template.credit_legs, trigger.currency),
        third=ThirdEntry(
            reference_key=f"{rule.rule_id}:{trigger.reference_key}", metadata=metadata
        ),
    )


def evaluate_settlement_rules(
    chain: LedgerChain, rules: Sequence[SettlementRule]
) -> List[TripleEntryRecord]:
    """
    Emit settlement records for every unsettled trigger.

    Records are visited in chain order and rules in the given order.
    Settlement records never trigger rules themselves.

    Args:
        chain: Ledger to scan.
        rules: Rules to evaluate.

    Returns:
        Unsealed settlement records, ready for append_record.

    Raises:
        RuleTemplateUnbalanced: If a rule's template does not balance.
        InvalidRule: If a rule is otherwise malformed.
    """
    for rule in rules:
        rule.validate()

    settled: Set[str] = {
        tag
        for record in chain.records
        for tag in record.metadata.tags
        if tag.startswith(SETTLES_PREFIX)
    }
    existing_keys = set(chain.reference_keys)

    emitted: List[TripleEntryRecord] = []
    for trigger in chain.records:
        if SETTLEMENT_TAG in trigger.metadata.tags:
            continue
        for rule in rules:
            tag = settlement_tag(rule.rule_id, trigger.reference_key)
            if tag in settled or not rule.applies_to(trigger):
                continue
            amount = rule.template.settlement_amount(trigger)
            if amount <= 0:
                logger.warning(
                    f"Rule {rule.rule_id} on {trigger.reference_key}: settlement amount rounds to 0, skipped"
                )
                continue
            record = _settlement_record(rule, trigger, amount)
            if record.reference_key in existing_keys:
                logger.warning(
                    f"Settlement key {record.reference_key} already used in chain, skipped"
                )
                continue
            emitted.append(record)
            settled.add(tag)
            existing_keys.add(record.reference_key)
            logger.debug(f"Rule {rule.rule_id} fired on {trigger.reference_key}")

    logger.info(f"Settlement evaluation emitted {len(emitted)} record(s)")
    return emitted
