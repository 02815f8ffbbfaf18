"""GSAP-1: upflow chain to U_n, then a downflow back to U_1.

The terminal user keeps the upflow chain C_0 = s, C_1, ..., C_{n-1}
(slot 0 holds C_0) because every later rekey starts from it.
"""
import logging
from typing import Any, Dict, List, Optional, Sequence

from ..backends.base import GElement, SElement
from .base import GroupKeyProtocol
from .session import GroupSession, SessionResult

logger = logging.getLogger(__name__)


def previous_slot(chain_members: Sequence[int], member: int) -> int:
    """Chain slot feeding `member` (0 for the first member)."""
    position = list(chain_members).index(member)
    return chain_members[position - 1] if position else 0


def downflow(session: GroupSession, terminal: int, apply_g: GElement,
             chain: Dict[int, SElement], first_round: int, step: str = "downflow") -> int:
    """Send f values from the terminal down to the first member and let everyone finalize.

    `chain` maps 0 and every non-terminal member to its C value. The
    terminal computes f_m = Φ(apply_g, C_prev(m)) for each non-terminal
    member m; each member strips its own value, applies its private element
    to the rest and passes them down. Returns the next free round number.
    """
    backend = session.backend
    bus = session.bus
    members = [m for m in session.members if m != terminal]
    values = {m: backend.act(apply_g, chain[previous_slot(members, m)]) for m in members}

    round_no = first_round
    sender = terminal
    for position in range(len(members) - 1, -1, -1):
        recipient = members[position]
        slots = members[:position + 1]
        bus.deliver_round(session.epoch, round_no, [session.message(
            round_no, sender, recipient, [values[m] for m in slots], step, slots)])
        round_no += 1

        user = session.member(recipient)
        message = bus.receive_one(recipient, step)
        own = message.slot_value(recipient)
        user.set_key(session.epoch, backend.act(user.private_g, own))
        values = {m: backend.act(user.private_g, message.slot_value(m)) for m in message.slots[:-1]}
        sender = recipient
    return round_no


class GSAP1(GroupKeyProtocol):
    tag = "gsap1"
    title = "GSAP-1"

    def execute(self, session: GroupSession) -> None:
        backend = self.backend
        bus = session.bus
        n = len(session.participants)
        s = backend.base()

        # upflow: U_i sends {C_1, ..., C_i} to U_{i+1}
        for i in range(1, n):
            user = session.member(i)
            received: List[SElement] = list(bus.receive_one(i, "upflow").payload) if i > 1 else []
            previous = received[-1] if received else s
            payload = received + [backend.act(user.private_g, previous)]
            bus.deliver_round(session.epoch, i, [
                session.message(i, i, i + 1, payload, "upflow", range(1, i + 1))
            ])

        terminal = session.member(n)
        upflow = bus.receive_one(n, "upflow")
        terminal.cache = {0: s}
        terminal.cache.update(zip(upflow.slots, upflow.payload))
        terminal.set_key(session.epoch, backend.act(terminal.private_g, upflow.payload[-1]))

        downflow(session, n, terminal.private_g, terminal.cache, first_round=n)


def gsap1_run(backend, n: int, seed: Any = 0,
              private_elements: Optional[Sequence[GElement]] = None) -> SessionResult:
    """Run GSAP-1 for U_1..U_n and return the epoch-0 result."""
    return GSAP1(backend).run(n, seed, private_elements)
