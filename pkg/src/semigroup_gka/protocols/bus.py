"""Deterministic in-memory message bus with a round barrier.

Messages sent during a round stay pending until the round is closed; only
then are they delivered, appended to the transcript and made readable by
their recipients. Nobody can read a message of round r before round r ends.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

from ..exceptions import ProtocolError
from .session import BROADCAST, ProtocolMessage, Transcript, replace_seq

logger = logging.getLogger(__name__)


class DeliveryStatus(Enum):
    PENDING = "pending"
    DELIVERED = "delivered"


@dataclass
class BusRecord:
    seq: int
    message: ProtocolMessage
    status: DeliveryStatus = DeliveryStatus.PENDING


class MessageBus:
    """Delivers messages in send order; the same calls always give the same transcript."""

    def __init__(self, public_params: Dict[str, Any], members: Iterable[int] = ()):
        self.records: List[BusRecord] = []
        self.transcript = Transcript(dict(public_params))
        self._members = set(members)
        self._inboxes: Dict[int, List[ProtocolMessage]] = {}
        self._open: Optional[Tuple[int, int]] = None
        self._last: Tuple[int, int] = (-1, 0)

    @property
    def members(self) -> List[int]:
        return sorted(self._members)

    def register(self, index: int) -> None:
        self._members.add(index)

    def unregister(self, index: int) -> None:
        self._members.discard(index)
        self._inboxes.pop(index, None)

    @property
    def open_round(self) -> Optional[Tuple[int, int]]:
        return self._open

    def begin_round(self, epoch: int, round_no: int) -> None:
        if self._open is not None:
            raise ProtocolError(f"round {self._open[1]} of epoch {self._open[0]} is still open")
        if (epoch, round_no) <= self._last:
            raise ProtocolError(f"round ({epoch}, {round_no}) does not follow {self._last}")
        self._open = (epoch, round_no)

    def send(self, message: ProtocolMessage) -> ProtocolMessage:
        if self._open != (message.epoch, message.round):
            raise ProtocolError(
                f"U_{message.sender} sent in round ({message.epoch}, {message.round}) "
                f"but the open round is {self._open}"
            )
        if message.sender not in self._members:
            raise ProtocolError(f"U_{message.sender} is not on the bus")
        if message.recipient != BROADCAST and message.recipient not in self._members:
            raise ProtocolError(f"U_{message.recipient} is not on the bus")
        stamped = replace_seq(message, len(self.records) + 1)
        self.records.append(BusRecord(stamped.seq, stamped))
        logger.debug(
            "#%d %s e%d r%d %s U_%d -> %s (%d elements)",
            stamped.seq, stamped.protocol, stamped.epoch, stamped.round, stamped.step,
            stamped.sender, "all" if stamped.is_broadcast else f"U_{stamped.recipient}",
            len(stamped.payload),
        )
        return stamped

    def end_round(self) -> List[ProtocolMessage]:
        """Deliver everything pending in send order and close the round."""
        if self._open is None:
            raise ProtocolError("no round is open")
        delivered = []
        for record in self.records:
            if record.status is not DeliveryStatus.PENDING:
                continue
            record.status = DeliveryStatus.DELIVERED
            message = record.message
            self.transcript.append(message)
            if message.is_broadcast:
                targets = [i for i in self._members if i != message.sender]
            else:
                targets = [message.recipient]
            for target in targets:
                self._inboxes.setdefault(target, []).append(message)
            delivered.append(message)
        self._last = self._open
        self._open = None
        return delivered

    def receive(self, index: int, step: Optional[str] = None) -> List[ProtocolMessage]:
        """Take the delivered messages waiting for U_index (optionally one step only)."""
        inbox = self._inboxes.get(index, [])
        taken = [m for m in inbox if step is None or m.step == step]
        self._inboxes[index] = [m for m in inbox if m not in taken]
        return taken

    def receive_one(self, index: int, step: str) -> ProtocolMessage:
        messages = self.receive(index, step)
        if len(messages) != 1:
            raise ProtocolError(f"U_{index} expected one '{step}' message, got {len(messages)}")
        return messages[0]

    def pending(self) -> List[BusRecord]:
        return [r for r in self.records if r.status is DeliveryStatus.PENDING]

    def deliver_round(self, epoch: int, round_no: int,
                      messages: Iterable[ProtocolMessage]) -> List[ProtocolMessage]:
        """Open a round, send all messages, close it."""
        self.begin_round(epoch, round_no)
        for message in messages:
            self.send(message)
        return self.end_round()
