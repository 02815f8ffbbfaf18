"""GSAP-4: two rounds over a linear action on an abelian semigroup S.

Round 1: every U_i broadcasts Φ(g_i, s).
Round 2: U_j broadcasts D_i = Φ(g_j, ∏_{r≠j,i} Φ(g_r, s)) for every i ≠ j.
Everyone ends with K = Φ(g_j, ∏_{r≠j} Φ(g_r, s)).

With n = 2 the product defining D_i is empty, so at least three users are
required; the two-party case is the plain exchange in `dh.py`.
"""
from typing import Any, Optional, Sequence

from ..backends.base import GElement, SElement
from ..exceptions import ProtocolError
from .base import GroupKeyProtocol
from .session import BROADCAST, GroupSession, SessionResult


class GSAP4(GroupKeyProtocol):
    tag = "gsap4"
    title = "GSAP-4"
    requires = ("linear", "s_is_abelian_semigroup")
    min_n = 3

    def __init__(self, backend, j: Optional[int] = None):
        super().__init__(backend)
        self.j = j

    def start(self, n: int, seed: Any = 0,
              private_elements: Optional[Sequence[GElement]] = None) -> GroupSession:
        j = n if self.j is None else self.j
        if not isinstance(n, int) or not 1 <= j <= n:
            raise ProtocolError(f"j={j} is not a user index in 1..{n}")
        session = super().start(n, seed, private_elements)
        session.actor = j
        return session

    def execute(self, session: GroupSession) -> None:
        backend = self.backend
        bus = session.bus
        j = session.actor
        s = backend.base()

        bus.deliver_round(session.epoch, 1, [
            session.message(1, i, BROADCAST, [backend.act(user.private_g, s)], "public", [i])
            for i, user in session.participants.items()
        ])

        published = {}
        for i in session.members:
            for message in bus.receive(i, "public"):
                published.setdefault(message.sender, message.payload[0])
        own_j = session.member(j)
        own_j.broadcaster = True
        public = dict(published)
        public[j] = backend.act(own_j.private_g, s)

        others = [i for i in session.members if i != j]
        d_values = [
            backend.act(own_j.private_g, backend.s_combine_all([public[r] for r in others if r != i]))
            for i in others
        ]
        bus.deliver_round(session.epoch, 2, [
            session.message(2, j, BROADCAST, d_values, "d-values", others)
        ])

        own_j.set_key(session.epoch, backend.act(
            own_j.private_g, backend.s_combine_all([public[r] for r in others])))
        for i in others:
            user = session.member(i)
            message = bus.receive_one(i, "d-values")
            key = backend.s_combine(message.slot_value(i), backend.act(user.private_g, public[j]))
            user.set_key(session.epoch, key)

    def oracle_key(self, session: GroupSession) -> SElement:
        """Φ(g_j, ∏_{r≠j} Φ(g_r, s)) from the private elements."""
        backend = self.backend
        s = backend.base()
        j = session.actor
        products = [backend.act(p.private_g, s) for i, p in session.participants.items() if i != j]
        return backend.act(session.member(j).private_g, backend.s_combine_all(products))


def gsap4_run(backend, n: int, j: Optional[int] = None, seed: Any = 0,
              private_elements: Optional[Sequence[GElement]] = None) -> SessionResult:
    """Run GSAP-4 with U_j (default U_n) as the second-round broadcaster."""
    return GSAP4(backend, j).run(n, seed, private_elements)
