"""
Additive secret sharing and the simulated secure-sum protocol.

Parties run in-process. The protocol is a fixed message sequence: every
party shares its local sum with every other party, each party adds the
shares it holds, and the partial sums are broadcast and added. Only that
final opening reveals a value, and the message log records who sent what
kind of message to whom, never the value carried.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

from ..errors import TooFewParties, TripleEntryError
from .field import P, FieldElement, field_sum

logger = logging.getLogger(__name__)


class IncompleteShareSet(TripleEntryError):
    """Raised when reconstruction is attempted without every party's share."""

    pass


class MixedSessions(TripleEntryError):
    """Raised when shares from different sessions are combined."""

    pass


@dataclass(frozen=True)
class SecretShare:
    party_id: str
    value: FieldElement
    session_id: str
    party_count: int


@dataclass(frozen=True)
class Message:
    round: int
    sender: str
    receiver: str
    kind: str

    def to_dict(self) -> Dict[str, object]:
        return {"kind": self.kind, "receiver": self.receiver, "round": self.round, "sender": self.sender}


def _party_ids(n: int, party_ids: Optional[Sequence[str]]) -> List[str]:
    ids = list(party_ids) if party_ids is not None else [f"party-{i}" for i in range(n)]
    if len(ids) != n or len(set(ids)) != n:
        raise TripleEntryError(f"need {n} distinct party ids, got {ids}")
    return ids


def additive_split(
    secret: FieldElement,
    masks: Sequence[int],
    session_id: str = "",
    party_ids: Optional[Sequence[str]] = None,
) -> List[SecretShare]:
    """
    Shares [m_1, ..., m_{n-1}, secret - sum(m)] for the given masks.

    Raises:
        TooFewParties: If fewer than one mask (two parties) is given.
    """
    n = len(masks) + 1
    if n < 2:
        raise TooFewParties("secret sharing needs at least 2 parties")
    ids = _party_ids(n, party_ids)
    values = [FieldElement(int(m) % P) for m in masks]
    values.append(secret - field_sum(values))
    return [SecretShare(pid, v, session_id, n) for pid, v in zip(ids, values)]


def share_secret(
    secret: FieldElement,
    n: int,
    seed: Optional[int] = None,
    session_id: str = "",
    party_ids: Optional[Sequence[str]] = None,
    rng: Optional[np.random.Generator] = None,
) -> List[SecretShare]:
    """
    Split a secret into n additive shares.

    The first n - 1 shares are uniform over the field, drawn from ``rng`` or
    from a generator seeded with ``seed``.

    Raises:
        TooFewParties: If n < 2.
    """
    if n < 2:
        raise TooFewParties(f"secret sharing needs at least 2 parties, got {n}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    masks = [int(m) for m in rng.integers(0, P, size=n - 1, dtype=np.int64)]
    return additive_split(secret, masks, session_id, party_ids)


def reconstruct_secret(shares: Sequence[SecretShare]) -> FieldElement:
    """
    Open a complete share set.

    Raises:
        MixedSessions: If the shares belong to different sessions.
        IncompleteShareSet: Unless there is exactly one share per party.
    """
    if not shares:
        raise IncompleteShareSet("no shares to reconstruct")
    sessions = {s.session_id for s in shares}
    if len(sessions) > 1:
        raise MixedSessions(f"shares from sessions {sorted(sessions)}")
    expected = shares[0].party_count
    parties = {s.party_id for s in shares}
    if len(shares) != expected or len(parties) != expected:
        raise IncompleteShareSet(f"{len(parties)} distinct shares of {expected}")
    return field_sum(s.value for s in shares)


@dataclass
class SecureSumRun:
    aggregate: FieldElement
    session_id: str
    parties: List[str]
    messages: List[Message] = field(default_factory=list)


def run_secure_sum(
    per_party_inputs: Mapping[str, Sequence[FieldElement]],
    seed: int = 0,
    session_id: str = "secure-sum",
) -> SecureSumRun:
    """
    Simulate the secure-sum protocol and keep its message log.

    Party i (in sorted id order) draws its masks from a generator seeded
    with (seed, i).

    Raises:
        TooFewParties: If fewer than two parties take part.
    """
    parties = sorted(per_party_inputs)
    n = len(parties)
    if n < 2:
        raise TooFewParties(f"secure sum needs at least 2 parties, got {n}")

    messages: List[Message] = []
    held: Dict[str, List[SecretShare]] = {pid: [] for pid in parties}

    # round 1: each party shares its local sum
    for index, sender in enumerate(parties):
        local = field_sum(per_party_inputs[sender])
        shares = share_secret(
            local,
            n,
            session_id=f"{session_id}/input/{sender}",
            party_ids=parties,
            rng=np.random.default_rng([seed, index]),
        )
        for share in shares:
            held[share.party_id].append(share)
            if share.party_id != sender:
                messages.append(Message(1, sender, share.party_id, "input-share"))

    # round 2: each party broadcasts the sum of the shares it holds
    partials = [
        SecretShare(pid, field_sum(s.value for s in held[pid]), session_id, n) for pid in parties
    ]
    for partial in partials:
        for receiver in parties:
            if receiver != partial.party_id:
                messages.append(Message(2, partial.party_id, receiver, "partial-sum"))

    aggregate = reconstruct_secret(partials)
    logger.debug(f"Secure sum {session_id}: {n} parties, {len(messages)} messages")
    return SecureSumRun(aggregate=aggregate, session_id=session_id, parties=parties, messages=messages)


def secure_sum(
    per_party_inputs: Mapping[str, Sequence[FieldElement]],
    seed: int = 0,
    session_id: str = "secure-sum",
) -> FieldElement:
    """Field sum of every party's inputs, computed through run_secure_sum."""
    return run_secure_sum(per_party_inputs, seed, session_id).aggregate
