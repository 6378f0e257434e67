"""
Triple-entry record model.

A record carries debit legs, credit legs and a third entry holding the
contextual metadata (who, what, where, when, why) together with the hash
linkage that seals it into a chain. All types are immutable; amounts are
integer minor units.
"""

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Dict, FrozenSet, Iterable, Optional, Tuple

from ..errors import TripleEntryError

GENESIS_HASH = "0" * 64
MAX_MINOR_UNITS = 2**53

# Accounts under this prefix may carry zero-amount legs (audit attestations)
AUDIT_ACCOUNT_PREFIX = "audit:"

CURRENCY_PATTERN = re.compile(r"^[A-Z]{3}$")
HASH_PATTERN = re.compile(r"^[0-9a-f]{64}$")

# Minor-unit digits per ISO 4217 code where it differs from 2
MINOR_UNIT_DIGITS: Dict[str, int] = {
    "BHD": 3,
    "CLP": 0,
    "IQD": 3,
    "ISK": 0,
    "JOD": 3,
    "JPY": 0,
    "KRW": 0,
    "KWD": 3,
    "OMR": 3,
    "TND": 3,
    "UGX": 0,
    "VND": 0,
    "XXX": 0,
}


class InvalidRecord(TripleEntryError):
    """Raised when a record or one of its parts violates a type invariant."""

    pass


class UnbalancedRecord(InvalidRecord):
    """Raised when debit and credit totals differ."""

    pass


class CurrencyMismatch(InvalidRecord):
    """Raised when legs that must share a currency do not."""

    pass


def minor_unit_digits(currency: str) -> int:
    """Number of decimal places a currency's amounts carry."""
    return MINOR_UNIT_DIGITS.get(currency, 2)


def normalize_timestamp(value: Any) -> str:
    """
    Normalize a timestamp to UTC RFC 3339 with seconds precision.

    Args:
        value: RFC 3339 string with an explicit offset, or an aware datetime.

    Returns:
        String of the form ``YYYY-MM-DDTHH:MM:SSZ``.

    Raises:
        InvalidRecord: If the value cannot be parsed or carries no offset.
    """
    if isinstance(value, datetime):
        parsed = value
    elif isinstance(value, str):
        try:
            parsed = datetime.fromisoformat(value.strip())
        except ValueError as e:
            raise InvalidRecord(f"occurred_at is not RFC 3339: {value!r}") from e
    else:
        raise InvalidRecord(f"occurred_at must be a string, got {type(value).__name__}")

    if parsed.tzinfo is None or parsed.utcoffset() is None:
        raise InvalidRecord(f"occurred_at has no UTC offset: {value!r}")

    return parsed.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(value: str) -> datetime:
    """Parse a normalized timestamp back into an aware datetime."""
    return datetime.fromisoformat(normalize_timestamp(value))


@dataclass(frozen=True)
class MonetaryAmount:
    minor_units: int
    currency: str

    def __post_init__(self) -> None:
        if isinstance(self.minor_units, bool) or not isinstance(self.minor_units, int):
            raise InvalidRecord(
                f"minor_units must be an integer, got {self.minor_units!r}"
            )
        if abs(self.minor_units) >= MAX_MINOR_UNITS:
            raise InvalidRecord(f"minor_units magnitude too large: {self.minor_units}")
        if not isinstance(self.currency, str) or not CURRENCY_PATTERN.match(
            self.currency
        ):
            raise InvalidRecord(f"currency must match [A-Z]{{3}}, got {self.currency!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {"currency": self.currency, "minor_units": self.minor_units}


@dataclass(frozen=True)
class EntryLeg:
    account: str
    amount: MonetaryAmount

    def __post_init__(self) -> None:
        if not isinstance(self.account, str) or not self.account:
            raise InvalidRecord("leg account must be a non-empty string")
        if not isinstance(self.amount, MonetaryAmount):
            raise InvalidRecord("leg amount must be a MonetaryAmount")
        if self.amount.minor_units < 0 or (
            self.amount.minor_units == 0
            and not self.account.startswith(AUDIT_ACCOUNT_PREFIX)
        ):
            raise InvalidRecord(
                f"leg on {self.account!r} must carry a positive amount, "
                f"got {self.amount.minor_units}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {"account": self.account, "amount": self.amount.to_dict()}


@dataclass(frozen=True)
class ContextMetadata:
    """Who, what, where, when and why of a transaction."""

    party_from: str
    party_to: str
    occurred_at: str
    location: Optional[str] = None
    item_description: Optional[str] = None
    tags: FrozenSet[str] = field(default_factory=frozenset)
    rationale: Optional[str] = None

    def __post_init__(self) -> None:
        for name in ("party_from", "party_to"):
            value = getattr(self, name)
            if not isinstance(value, str) or not value:
                raise InvalidRecord(f"{name} must be a non-empty string")
        if self.party_from == self.party_to:
            raise InvalidRecord(
                f"party_from and party_to must differ, both are {self.party_from!r}"
            )
        for name in ("location", "item_description", "rationale"):
            value = getattr(self, name)
            if value is not None and not isinstance(value, str):
                raise InvalidRecord(f"{name} must be a string or absent")

        tags = self.tags
        if isinstance(tags, str) or not all(isinstance(t, str) for t in tags):
            raise InvalidRecord("tags must be a collection of strings")
        object.__setattr__(self, "tags", frozenset(tags))
        object.__setattr__(self, "occurred_at", normalize_timestamp(self.occurred_at))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "item_description": self.item_description,
            "location": self.location,
            "occurred_at": self.occurred_at,
            "party_from": self.party_from,
            "party_to": self.party_to,
            "rationale": self.rationale,
            "tags": sorted(self.tags),
        }


@dataclass(frozen=True)
class ThirdEntry:
    reference_key: str
    metadata: ContextMetadata
    prev_record_hash: str = ""
    record_hash: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.reference_key, str) or not self.reference_key:
            raise InvalidRecord("reference_key must be a non-empty string")
        for name in ("prev_record_hash", "record_hash"):
            value = getattr(self, name)
            if value and not HASH_PATTERN.match(value):
                raise InvalidRecord(f"{name} must be 64 lowercase hex characters")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": self.metadata.to_dict(),
            "prev_record_hash": self.prev_record_hash,
            "record_hash": self.record_hash,
            "reference_key": self.reference_key,
        }


@dataclass(frozen=True)
class TripleEntryRecord:
    debits: Tuple[EntryLeg, ...]
    credits: Tuple[EntryLeg, ...]
    third: ThirdEntry

    def __post_init__(self) -> None:
        object.__setattr__(self, "debits", tuple(self.debits))
        object.__setattr__(self, "credits", tuple(self.credits))
        if not self.debits or not self.credits:
            raise InvalidRecord("a record needs at least one debit and one credit leg")
        for leg in self.debits + self.credits:
            if not isinstance(leg, EntryLeg):
                raise InvalidRecord("legs must be EntryLeg instances")

    @property
    def reference_key(self) -> str:
        return self.third.reference_key

    @property
    def metadata(self) -> ContextMetadata:
        return self.third.metadata

    @property
    def record_hash(self) -> str:
        return self.third.record_hash

    @property
    def currency(self) -> str:
        return self.debits[0].amount.currency

    @property
    def amount(self) -> int:
        """Transaction amount: the debit total in minor units."""
        return sum(leg.amount.minor_units for leg in self.debits)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "credits": [leg.to_dict() for leg in self.credits],
            "debits": [leg.to_dict() for leg in self.debits],
            "third": self.third.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TripleEntryRecord":
        """
        Rebuild a record from its serialized object form.

        Raises:
            InvalidRecord: If a field is missing or has the wrong shape.
        """
        try:
            third = data["third"]
            meta = third["metadata"]
            metadata = ContextMetadata(
                party_from=meta["party_from"],
                party_to=meta["party_to"],
                occurred_at=meta["occurred_at"],
                location=meta.get("location"),
                item_description=meta.get("item_description"),
                tags=frozenset(meta.get("tags") or ()),
                rationale=meta.get("rationale"),
            )
            return cls(
                debits=_legs_from_dicts(data["debits"]),
                credits=_legs_from_dicts(data["credits"]),
                third=ThirdEntry(
                    reference_key=third["reference_key"],
                    metadata=metadata,
                    prev_record_hash=third.get("prev_record_hash", ""),
                    record_hash=third.get("record_hash", ""),
                ),
            )
        except (KeyError, TypeError, AttributeError) as e:
            raise InvalidRecord(f"malformed record object: {e}") from e


def _legs_from_dicts(items: Iterable[Dict[str, Any]]) -> Tuple[EntryLeg, ...]:
    return tuple(
        EntryLeg(
            account=item["account"],
            amount=MonetaryAmount(
                minor_units=item["amount"]["minor_units"],
                currency=item["amount"]["currency"],
            ),
        )
        for item in items
    )


def simple_record(
    reference_key: str,
    debit_account: str,
    credit_account: str,
    minor_units: int,
    currency: str,
    metadata: ContextMetadata,
) -> TripleEntryRecord:
    """Build an unsealed one-debit, one-credit record."""
    amount = MonetaryAmount(minor_units, currency)
    return TripleEntryRecord(
        debits=(EntryLeg(debit_account, amount),),
        credits=(EntryLeg(credit_account, amount),),
        third=ThirdEntry(reference_key=reference_key, metadata=metadata),
    )
