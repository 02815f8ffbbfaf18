"""GSAP-2: upflow of growing C_j^i lists, one broadcast by U_n.

Every user caches the broadcast {f_1^n, ..., f_n^n}, where position i holds
Φ(∏_{r≠i} g_r, s); rekeying reuses it.
"""
from typing import Any, Optional, Sequence

from ..backends.base import GElement
from .base import GroupKeyProtocol
from .session import BROADCAST, GroupSession, SessionResult


def finalize_from_vector(session: GroupSession, vector, slots, aux=None) -> None:
    """Each current member applies its private element to its own position and caches the vector."""
    backend = session.backend
    cached = dict(zip(slots, vector))
    for index, user in session.participants.items():
        user.cache = dict(cached)
        user.aux = aux
        user.set_key(session.epoch, backend.act(user.private_g, cached[index]))


class GSAP2(GroupKeyProtocol):
    tag = "gsap2"
    title = "GSAP-2"

    def execute(self, session: GroupSession) -> None:
        backend = self.backend
        bus = session.bus
        n = len(session.participants)
        s = backend.base()

        # U_i sends {C_{i-1}^{i-1}, C_1^i, ..., C_i^i}
        for i in range(1, n):
            g = session.member(i).private_g
            if i == 1:
                payload = [s, backend.act(g, s)]
            else:
                received = bus.receive_one(i, "upflow").payload
                before_last, last_row = received[0], received[1:]
                row = [backend.act(g, before_last)] + [backend.act(g, c) for c in last_row]
                payload = [last_row[-1]] + row
            bus.deliver_round(session.epoch, i, [session.message(i, i, i + 1, payload, "upflow")])

        terminal = session.member(n)
        received = bus.receive_one(n, "upflow").payload
        before_last, last_row = received[0], received[1:]
        g_n = terminal.private_g
        f = [backend.act(g_n, last_row[n - 2 - i]) for i in range(1, n - 1)]
        f.append(backend.act(g_n, before_last))
        f.append(last_row[-1])
        slots = list(range(1, n + 1))

        terminal.broadcaster = True
        bus.deliver_round(session.epoch, n, [
            session.message(n, n, BROADCAST, f, "broadcast", slots)
        ])
        # the broadcaster reads its own vector; everyone else reads it from the bus
        for i in range(1, n):
            bus.receive_one(i, "broadcast")
        finalize_from_vector(session, f, slots)


def gsap2_run(backend, n: int, seed: Any = 0,
              private_elements: Optional[Sequence[GElement]] = None) -> SessionResult:
    """Run GSAP-2 for U_1..U_n and return the epoch-0 result."""
    return GSAP2(backend).run(n, seed, private_elements)
