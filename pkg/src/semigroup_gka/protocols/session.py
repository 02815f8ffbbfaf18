"""Participants, messages, transcripts and the per-group session state."""
import hashlib
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from ..backends.base import ActionBackend, GElement, SElement
from ..exceptions import InvariantViolation, ProtocolError
from ..utils.logger import fingerprint

logger = logging.getLogger(__name__)

BROADCAST = 0


def derive_rng(seed: Any, label: str) -> random.Random:
    """Independent deterministic stream for one (seed, label) pair."""
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))


@dataclass(frozen=True)
class ProtocolMessage:
    """One unicast or broadcast. `slots[k]` names the user payload[k] is meant for."""
    protocol: str
    epoch: int
    round: int
    sender: int
    recipient: int
    payload: Tuple[SElement, ...]
    step: str = ""
    slots: Tuple[int, ...] = ()
    aux: Optional[SElement] = None
    seq: int = 0

    @property
    def is_broadcast(self) -> bool:
        return self.recipient == BROADCAST

    def elements(self) -> Iterator[SElement]:
        yield from self.payload
        if self.aux is not None:
            yield self.aux

    def slot_value(self, index: int) -> SElement:
        try:
            return self.payload[self.slots.index(index)]
        except ValueError:
            raise ProtocolError(f"message #{self.seq} carries no value for U_{index}") from None


@dataclass
class Transcript:
    """Everything a global passive eavesdropper sees, in delivery order."""
    public_params: Dict[str, Any]
    _messages: List[ProtocolMessage] = field(default_factory=list)
    epoch_markers: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def messages(self) -> Tuple[ProtocolMessage, ...]:
        return tuple(self._messages)

    def __len__(self) -> int:
        return len(self._messages)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Transcript):
            return NotImplemented
        return (self.public_params == other.public_params
                and self._messages == other._messages
                and self.epoch_markers == other.epoch_markers)

    def append(self, message: ProtocolMessage) -> None:
        if self._messages and message.seq <= self._messages[-1].seq:
            raise InvariantViolation("transcript sequence numbers must increase")
        self._messages.append(message)

    def mark_epoch(self, epoch: int, event: str) -> None:
        self.epoch_markers.append({
            "epoch": epoch,
            "event": event,
            "first_seq": (self._messages[-1].seq + 1) if self._messages else 1,
        })

    def for_epoch(self, epoch: int) -> "Transcript":
        return Transcript(
            dict(self.public_params),
            [m for m in self._messages if m.epoch == epoch],
            [e for e in self.epoch_markers if e["epoch"] == epoch],
        )

    def elements(self) -> Iterator[Tuple[ProtocolMessage, int, SElement]]:
        """(message, position, element) for every payload element and aux value."""
        for message in self._messages:
            for position, element in enumerate(message.elements()):
                yield message, position, element

    def rounds(self, epoch: int) -> List[int]:
        return sorted({m.round for m in self._messages if m.epoch == epoch})


@dataclass
class ParticipantState:
    """One user's private state. Only its own driver mutates it."""
    index: int
    n: int
    private_g: GElement
    initiator: bool = False
    terminal: bool = False
    broadcaster: bool = False
    cache: Dict[int, SElement] = field(default_factory=dict)
    aux: Optional[SElement] = None
    derived_key: Optional[SElement] = None
    key_epoch: Optional[int] = None

    def set_key(self, epoch: int, key: SElement) -> None:
        if self.key_epoch is not None and self.key_epoch >= epoch:
            raise ProtocolError(f"U_{self.index} already derived the key of epoch {epoch}")
        self.derived_key = key
        self.key_epoch = epoch

    def __repr__(self) -> str:
        return f"ParticipantState(U_{self.index}, epoch={self.key_epoch})"


@dataclass
class GroupSession:
    """Mutable state of one group across epochs.

    `key_factors` is the oracle ledger: the G contributions whose product,
    acting on s, is the current group key. Protocol code never reads it.
    """
    protocol: str
    backend: ActionBackend
    participants: Dict[int, ParticipantState]
    bus: Any
    seed: Any = 0
    epoch: int = 0
    terminal: int = 0
    actor: int = 0
    departed: Dict[int, ParticipantState] = field(default_factory=dict)
    key_factors: Dict[str, GElement] = field(default_factory=dict)
    initial_factors: Dict[str, GElement] = field(default_factory=dict)
    oracle_keys: Dict[int, SElement] = field(default_factory=dict)
    epoch_keys: Dict[int, SElement] = field(default_factory=dict)
    next_index: int = 0

    @property
    def transcript(self) -> Transcript:
        return self.bus.transcript

    @property
    def members(self) -> List[int]:
        return sorted(self.participants)

    def member(self, index: int) -> ParticipantState:
        try:
            return self.participants[index]
        except KeyError:
            raise ProtocolError(f"U_{index} is not a current member") from None

    def ledger_key(self) -> SElement:
        return self.backend.act_all(self.key_factors.values(), self.backend.base())

    def message(self, round_no: int, sender: int, recipient: int, payload: Sequence[SElement],
                step: str, slots: Sequence[int] = (), aux: Optional[SElement] = None) -> ProtocolMessage:
        return ProtocolMessage(
            protocol=self.protocol,
            epoch=self.epoch,
            round=round_no,
            sender=sender,
            recipient=recipient,
            payload=tuple(payload),
            step=step,
            slots=tuple(slots),
            aux=aux,
        )

    def finish_epoch(self, oracle_key: SElement) -> "SessionResult":
        keys = {i: p.derived_key for i, p in self.participants.items() if p.key_epoch == self.epoch}
        missing = [i for i in self.participants if i not in keys]
        if missing:
            raise InvariantViolation(f"members {missing} derived no key in epoch {self.epoch}")
        self.oracle_keys[self.epoch] = oracle_key
        first = next(iter(keys.values()))
        if all(k == first for k in keys.values()):
            self.epoch_keys[self.epoch] = first
        logger.info(
            "%s epoch %d finished: %d members, key %s",
            self.protocol, self.epoch, len(keys),
            fingerprint(self.backend.serialize_s(first)),
        )
        return SessionResult(
            protocol=self.protocol,
            epoch=self.epoch,
            keys=keys,
            transcript=self.transcript.for_epoch(self.epoch),
            oracle_key=oracle_key,
            session=self,
        )


@dataclass(frozen=True)
class SessionResult:
    """Outcome of one epoch: every member's key, the epoch transcript and the oracle key."""
    protocol: str
    epoch: int
    keys: Dict[int, SElement]
    transcript: Transcript
    oracle_key: SElement
    session: GroupSession = field(compare=False, repr=False)

    @property
    def agreed(self) -> bool:
        values = list(self.keys.values())
        return all(k == values[0] for k in values)

    @property
    def key(self) -> SElement:
        if not self.agreed:
            raise InvariantViolation(f"{self.protocol} epoch {self.epoch}: members disagree on the key")
        return next(iter(self.keys.values()))

    @property
    def backend(self) -> ActionBackend:
        return self.session.backend


def make_participants(backend: ActionBackend, n: int, seed: Any,
                      private_elements: Optional[Sequence[GElement]] = None) -> Dict[int, ParticipantState]:
    """U_1..U_n with private elements either given or drawn from per-user streams."""
    if private_elements is not None and len(private_elements) != n:
        raise ProtocolError(f"expected {n} private elements, got {len(private_elements)}")
    participants = {}
    for i in range(1, n + 1):
        if private_elements is not None:
            g = private_elements[i - 1]
            backend.serialize_g(g)  # ownership check
        else:
            g = backend.sample_g(derive_rng(seed, f"participant/{i}"))
        participants[i] = ParticipantState(index=i, n=n, private_g=g, initiator=(i == 1), terminal=(i == n))
    return participants


def replace_seq(message: ProtocolMessage, seq: int) -> ProtocolMessage:
    return replace(message, seq=seq)
