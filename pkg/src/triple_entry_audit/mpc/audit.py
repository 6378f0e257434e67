"""
Privacy-preserving compliance audits and their on-ledger attestations.

Each party derives a private aggregate from its own chain; the aggregates
are combined with the secure-sum protocol and a predicate is evaluated on
the opened total only. The resulting transcript is hashed canonically and
can be recorded back into a ledger as a zero-amount attestation record.
"""

import hashlib
import hmac
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .. import config as defaults
from ..errors import TooFewParties, TripleEntryError
from ..ledger import (
    AUDIT_ACCOUNT_PREFIX,
    ContextMetadata,
    CurrencyMismatch,
    LedgerChain,
    TripleEntryRecord,
    append_record,
    canonical_json_bytes,
    normalize_timestamp,
    parse_timestamp,
    sha256_hex,
    simple_record,
)
from .field import FieldElement, decode_amount, encode_amount
from .sharing import Message, run_secure_sum

logger = logging.getLogger(__name__)

AUDITOR_PARTY = "mpc-audit"
ATTESTATION_DEBIT_ACCOUNT = f"{AUDIT_ACCOUNT_PREFIX}attestation"
ATTESTATION_CREDIT_ACCOUNT = f"{AUDIT_ACCOUNT_PREFIX}verdict"
ATTESTATION_CURRENCY = "XXX"
ATTESTATION_TAG = "attestation"
VERDICT_TAG_PREFIX = "verdict:"
TRANSCRIPT_TAG_PREFIX = "transcript:"
EMPTY_CHAIN_TIMESTAMP = "1970-01-01T00:00:00Z"

PREDICATES = ("net_balance_zero", "aggregate_below_threshold", "capital_ratio_at_least")

_PREDICATE_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*([^)]*?)\s*\))?\s*$")


class UnknownPredicate(TripleEntryError):
    """Raised when an audit names a predicate that does not exist or lacks its parameter."""

    pass


@dataclass(frozen=True)
class AuditPredicate:
    name: str
    parameter: Optional[str] = None

    @property
    def description(self) -> str:
        return self.name if self.parameter is None else f"{self.name}({self.parameter})"


def parse_predicate(
    text: str, limit: Optional[int] = None, min_ratio: Optional[float] = None
) -> AuditPredicate:
    """
    Read ``name`` or ``name(argument)``.

    The argument may also come from ``limit`` (aggregate_below_threshold)
    or ``min_ratio`` (capital_ratio_at_least).

    Raises:
        UnknownPredicate: On an unknown name or a missing/invalid argument.
    """
    match = _PREDICATE_CALL.match(text or "")
    if not match or match.group(1) not in PREDICATES:
        raise UnknownPredicate(f"unknown predicate {text!r}; expected one of {PREDICATES}")
    name, argument = match.group(1), match.group(2) or None

    if name == "net_balance_zero":
        if argument:
            raise UnknownPredicate("net_balance_zero takes no argument")
        return AuditPredicate(name)
    if name == "aggregate_below_threshold":
        argument = argument if argument is not None else (None if limit is None else str(limit))
        if argument is None or not re.fullmatch(r"-?\d+", argument):
            raise UnknownPredicate("aggregate_below_threshold needs an integer limit in minor units")
        return AuditPredicate(name, str(int(argument)))

    argument = argument if argument is not None else (None if min_ratio is None else repr(min_ratio))
    try:
        ratio = Fraction(argument) if argument is not None else None
    except ValueError:
        ratio = None
    if ratio is None or ratio < 0:
        raise UnknownPredicate("capital_ratio_at_least needs a non-negative ratio")
    return AuditPredicate(name, argument)


@dataclass
class AuditTranscript:
    """
    Public record of one audit: who took part, what was opened, the verdict.

    ``opened_values`` holds aggregates only, as (name, field element).
    """

    session_id: str
    parties: List[str]
    predicate: str
    opened_values: List[Tuple[str, FieldElement]]
    verdict: str
    messages: List[Message] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "messages": [m.to_dict() for m in self.messages],
            "opened_values": [
                {"decoded": decode_amount(value), "name": name, "value": value.value}
                for name, value in self.opened_values
            ],
            "parties": list(self.parties),
            "predicate": self.predicate,
            "session_id": self.session_id,
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return canonical_json_bytes(self.to_dict()).decode("utf-8")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AuditTranscript":
        """
        Rebuild a transcript written by to_dict.

        Raises:
            TripleEntryError: If the document is malformed.
        """
        try:
            return cls(
                session_id=data["session_id"],
                parties=list(data["parties"]),
                predicate=data["predicate"],
                opened_values=[
                    (item["name"], FieldElement(int(item["value"])))
                    for item in data["opened_values"]
                ],
                verdict=data["verdict"],
                messages=[Message(**m) for m in data.get("messages", [])],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise TripleEntryError(f"malformed audit transcript: {e}") from e

    @property
    def transcript_hash(self) -> str:
        return sha256_hex(canonical_json_bytes(self.to_dict()))

    def opened(self, name: str) -> int:
        for opened_name, value in self.opened_values:
            if opened_name == name:
                return decode_amount(value)
        raise KeyError(name)


@dataclass(frozen=True)
class Attestation:
    transcript_hash: str
    verdict: str
    session_id: str
    recorded_at: str

    def to_dict(self) -> Dict[str, str]:
        return {
            "recorded_at": self.recorded_at,
            "session_id": self.session_id,
            "transcript_hash": self.transcript_hash,
            "verdict": self.verdict,
        }

    @classmethod
    def from_record(cls, record: TripleEntryRecord) -> Optional["Attestation"]:
        """Read an attestation back from a ledger record; None if it is not one."""
        tags = record.metadata.tags
        if ATTESTATION_TAG not in tags:
            return None
        verdicts = [t[len(VERDICT_TAG_PREFIX) :] for t in tags if t.startswith(VERDICT_TAG_PREFIX)]
        hashes = [t[len(TRANSCRIPT_TAG_PREFIX) :] for t in tags if t.startswith(TRANSCRIPT_TAG_PREFIX)]
        if len(verdicts) != 1 or len(hashes) != 1:
            return None
        return cls(
            transcript_hash=hashes[0],
            verdict=verdicts[0],
            session_id=record.reference_key,
            recorded_at=record.metadata.occurred_at,
        )


# ============================================================================
# PRIVATE AGGREGATES
# ============================================================================


def _business_records(chain: LedgerChain) -> List[TripleEntryRecord]:
    """Records other than zero-amount audit attestations."""
    return [
        r
        for r in chain
        if not all(leg.account.startswith(AUDIT_ACCOUNT_PREFIX) for leg in (*r.debits, *r.credits))
    ]


def _single_currency(records: List[TripleEntryRecord], party: str) -> None:
    currencies = {r.currency for r in records}
    if len(currencies) > 1:
        raise CurrencyMismatch(f"chain of {party} mixes currencies {sorted(currencies)}")


def net_position(chain: LedgerChain, party: str) -> int:
    """Amounts received by the party minus amounts it paid."""
    records = _business_records(chain)
    _single_currency(records, party)
    total = 0
    for record in records:
        if record.metadata.party_to == party:
            total += record.amount
        if record.metadata.party_from == party:
            total -= record.amount
    return total


def gross_outflow(chain: LedgerChain, party: str) -> int:
    records = _business_records(chain)
    _single_currency(records, party)
    return sum(r.amount for r in records if r.metadata.party_from == party)


def account_total(chain: LedgerChain, prefix: str, side: str) -> int:
    """Sum of debit or credit legs on accounts starting with ``prefix``."""
    records = _business_records(chain)
    _single_currency(records, chain.owner)
    legs = [leg for r in records for leg in (r.debits if side == "debit" else r.credits)]
    return sum(leg.amount.minor_units for leg in legs if leg.account.startswith(prefix))


def default_session_id(parties: List[str], predicate: AuditPredicate, seed: int) -> str:
    digest = sha256_hex(
        canonical_json_bytes({"parties": parties, "predicate": predicate.description, "seed": seed})
    )
    return f"audit-{digest[:16]}"


def run_compliance_audit(
    chains: Mapping[str, LedgerChain],
    predicate: Any,
    seed: int = 0,
    session_id: Optional[str] = None,
) -> AuditTranscript:
    """
    Evaluate a compliance predicate over the parties' joint aggregate.

    Predicates:
        net_balance_zero: sum of every party's net position is 0.
        aggregate_below_threshold(limit): total gross outflow < limit.
        capital_ratio_at_least(r): credits on capital accounts divided by
            debits on exposure accounts is at least r; zero exposure fails.

    Args:
        chains: Party id -> that party's own chain.
        predicate: An AuditPredicate or its text form.
        seed: Seed for the share masks.
        session_id: Defaults to a digest of parties, predicate and seed.

    Raises:
        TooFewParties: With fewer than two parties.
        UnknownPredicate: On an unknown predicate.
    """
    if not isinstance(predicate, AuditPredicate):
        predicate = parse_predicate(str(predicate))
    parties = sorted(chains)
    if len(parties) < 2:
        raise TooFewParties(f"an audit needs at least 2 parties, got {len(parties)}")
    session_id = session_id or default_session_id(parties, predicate, seed)

    if predicate.name == "net_balance_zero":
        private = {"net_position": {p: net_position(chains[p], p) for p in parties}}
    elif predicate.name == "aggregate_below_threshold":
        private = {"gross_outflow": {p: gross_outflow(chains[p], p) for p in parties}}
    else:
        private = {
            "capital": {
                p: account_total(chains[p], defaults.CAPITAL_ACCOUNT_PREFIX, "credit")
                for p in parties
            },
            "exposure": {
                p: account_total(chains[p], defaults.EXPOSURE_ACCOUNT_PREFIX, "debit")
                for p in parties
            },
        }

    opened_values: List[Tuple[str, FieldElement]] = []
    messages: List[Message] = []
    for offset, (name, values) in enumerate(private.items()):
        run = run_secure_sum(
            {p: [encode_amount(v)] for p, v in values.items()},
            seed=seed + offset,
            session_id=f"{session_id}/{name}",
        )
        opened_values.append((name, run.aggregate))
        messages.extend(run.messages)

    opened = {name: decode_amount(value) for name, value in opened_values}
    if predicate.name == "net_balance_zero":
        passed = opened["net_position"] == 0
    elif predicate.name == "aggregate_below_threshold":
        passed = opened["gross_outflow"] < int(predicate.parameter)
    else:
        exposure = opened["exposure"]
        passed = exposure > 0 and Fraction(opened["capital"], exposure) >= Fraction(
            predicate.parameter
        )

    transcript = AuditTranscript(
        session_id=session_id,
        parties=parties,
        predicate=predicate.description,
        opened_values=opened_values,
        verdict="pass" if passed else "fail",
        messages=messages,
    )
    logger.info(f"Audit {session_id} ({predicate.description}): {transcript.verdict}")
    return transcript


# ============================================================================
# ATTESTATION
# ============================================================================


def _latest_timestamp(chain: LedgerChain) -> str:
    if len(chain) == 0:
        return EMPTY_CHAIN_TIMESTAMP
    latest = max(parse_timestamp(r.metadata.occurred_at) for r in chain)
    return normalize_timestamp(latest)


def emit_attestation(
    transcript: AuditTranscript, target: LedgerChain, recorded_at: Optional[str] = None
) -> LedgerChain:
    """
    Append a zero-amount attestation record for the transcript.

    The record's reference key is the session id; its tags carry the
    verdict and the transcript hash. ``recorded_at`` defaults to the latest
    timestamp already on the chain so emission is reproducible.

    Raises:
        DuplicateReferenceKey: If the session was already attested.
    """
    transcript_hash = transcript.transcript_hash
    party_to = target.owner if target.owner != AUDITOR_PARTY else "ledger"
    metadata = ContextMetadata(
        party_from=AUDITOR_PARTY,
        party_to=party_to,
        occurred_at=recorded_at or _latest_timestamp(target),
        item_description=f"compliance audit {transcript.predicate}",
        tags=frozenset(
            {
                ATTESTATION_TAG,
                f"{VERDICT_TAG_PREFIX}{transcript.verdict}",
                f"{TRANSCRIPT_TAG_PREFIX}{transcript_hash}",
            }
        ),
        rationale=f"verdict={transcript.verdict} transcript={transcript_hash}",
    )
    record = simple_record(
        transcript.session_id,
        ATTESTATION_DEBIT_ACCOUNT,
        ATTESTATION_CREDIT_ACCOUNT,
        0,
        ATTESTATION_CURRENCY,
        metadata,
    )
    chain = append_record(target, record)
    logger.info(f"Recorded attestation {transcript.session_id} ({transcript.verdict})")
    return chain


def find_attestation(chain: LedgerChain, session_id: str) -> Optional[Attestation]:
    record = chain.find(session_id)
    return Attestation.from_record(record) if record is not None else None


def verify_attestation(chain: LedgerChain, transcript: AuditTranscript) -> bool:
    """True iff the chain attests this session with the recomputed hash and verdict."""
    attestation = find_attestation(chain, transcript.session_id)
    return (
        attestation is not None
        and attestation.transcript_hash == transcript.transcript_hash
        and attestation.verdict == transcript.verdict
    )


# ============================================================================
# RECORD LINKAGE
# ============================================================================


@dataclass
class LinkageResult:
    linked_count: int
    digests: List[str]
    party_counts: Dict[str, int]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "digests": list(self.digests),
            "linked_count": self.linked_count,
            "party_counts": dict(sorted(self.party_counts.items())),
        }


def linkage_key(seed: int) -> bytes:
    return hashlib.sha256(f"record-linkage:{seed}".encode("utf-8")).digest()


def blind_reference_key(reference_key: str, key: bytes) -> str:
    return hmac.new(key, reference_key.encode("utf-8"), hashlib.sha256).hexdigest()


def private_record_linkage(chains: Mapping[str, LedgerChain], seed: int = 0) -> LinkageResult:
    """
    Count the reference keys every party holds without exchanging them.

    Each party blinds its keys with HMAC-SHA-256 under a shared session key
    derived from the seed; only the blinded digests are compared.

    Raises:
        TooFewParties: With fewer than two parties.
    """
    parties = sorted(chains)
    if len(parties) < 2:
        raise TooFewParties(f"record linkage needs at least 2 parties, got {len(parties)}")
    key = linkage_key(seed)
    blinded = {
        p: {blind_reference_key(ref, key) for ref in chains[p].reference_keys} for p in parties
    }
    common = set.intersection(*blinded.values())
    logger.info(f"Record linkage across {len(parties)} parties: {len(common)} linked")
    return LinkageResult(
        linked_count=len(common),
        digests=sorted(common),
        party_counts={p: len(blinded[p]) for p in parties},
    )
