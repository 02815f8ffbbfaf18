from abc import ABC, abstractmethod
from typing import Any, Optional, Sequence, Tuple

from ..backends.base import ActionBackend, GElement, SElement
from ..exceptions import ProtocolError
from .bus import MessageBus
from .session import GroupSession, SessionResult, make_participants


class GroupKeyProtocol(ABC):
    """Abstract base class for the group key agreement protocols.

    Subclasses declare the backend capabilities they need and implement
    `execute`, which drives every participant through the rounds of epoch 0.
    """

    tag: str = ""
    title: str = ""
    requires: Tuple[str, ...] = ()
    min_n: int = 2

    def __init__(self, backend: ActionBackend):
        self.check_backend(backend)
        self.backend = backend

    @classmethod
    def check_backend(cls, backend: ActionBackend) -> None:
        """Raise UnsupportedCapabilityError before any message is sent."""
        for capability in cls.requires:
            backend.require(capability, cls.title)

    def check_n(self, n: int) -> None:
        if not isinstance(n, int) or n < self.min_n:
            raise ProtocolError(f"{self.title} needs at least {self.min_n} users, got {n}")

    def start(self, n: int, seed: Any = 0,
              private_elements: Optional[Sequence[GElement]] = None) -> GroupSession:
        self.check_n(n)
        participants = make_participants(self.backend, n, seed, private_elements)
        bus = MessageBus(self.backend.public_config(), participants)
        session = GroupSession(
            protocol=self.tag,
            backend=self.backend,
            participants=participants,
            bus=bus,
            seed=seed,
            terminal=n,
            actor=n,
            next_index=n + 1,
        )
        session.key_factors = {f"g{i}": p.private_g for i, p in participants.items()}
        session.initial_factors = dict(session.key_factors)
        session.transcript.mark_epoch(0, "setup")
        return session

    def run(self, n: int, seed: Any = 0,
            private_elements: Optional[Sequence[GElement]] = None) -> SessionResult:
        session = self.start(n, seed, private_elements)
        self.execute(session)
        return session.finish_epoch(self.oracle_key(session))

    @abstractmethod
    def execute(self, session: GroupSession) -> None:
        """Run all rounds of the first epoch"""

    def oracle_key(self, session: GroupSession) -> SElement:
        """Φ(∏ g_i, s), computed from the private elements directly."""
        return session.ledger_key()
