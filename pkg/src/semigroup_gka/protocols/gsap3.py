"""GSAP-3 and GSAP-3′: a chain up to U_{n-1}, then one reply from U_n.

GSAP-3 needs inverses in G: U_i sends D_i = Φ(g_i^{-1}, C_{n-1}).
GSAP-3′ needs a linear action on a group S instead: U_i sends
D_i = Φ(g_i, s)^{-1} C_{n-1} and U_n also publishes Φ(g_n, s).

Round layout for both: rounds 1..n-2 carry the chain C_i to U_{i+1},
round n-1 is U_{n-1}'s broadcast of C_{n-1}, round n the D_i unicasts to
U_n and round n+1 U_n's reply.
"""
from typing import Any, Dict, List, Optional, Sequence

from ..backends.base import GElement, SElement
from .base import GroupKeyProtocol
from .gsap2 import finalize_from_vector
from .session import BROADCAST, GroupSession, SessionResult


class GSAP3(GroupKeyProtocol):
    tag = "gsap3"
    title = "GSAP-3"
    requires = ("g_has_inverses",)

    def chain(self, session: GroupSession) -> Dict[int, SElement]:
        """Rounds 1..n-1; returns C_{n-1} as each user sees it."""
        backend = self.backend
        bus = session.bus
        n = len(session.participants)
        current = backend.base()
        for i in range(1, n):
            if i > 1:
                current = bus.receive_one(i, "chain").payload[0]
            current = backend.act(session.member(i).private_g, current)
            if i < n - 1:
                bus.deliver_round(session.epoch, i, [session.message(i, i, i + 1, [current], "chain")])
            else:
                session.member(i).broadcaster = True
                bus.deliver_round(session.epoch, i, [
                    session.message(i, i, BROADCAST, [current], "chain-broadcast")
                ])
        views = {n - 1: current}
        for i in session.members:
            if i != n - 1:
                views[i] = bus.receive_one(i, "chain-broadcast").payload[0]
        return views

    def d_value(self, session: GroupSession, index: int, c_last: SElement) -> SElement:
        g = session.member(index).private_g
        return self.backend.act(self.backend.g_invert(g), c_last)

    def reply(self, session: GroupSession, d_values: List[SElement], c_last: SElement):
        """U_n's broadcast payload and auxiliary value."""
        g_n = session.member(len(session.participants)).private_g
        return [self.backend.act(g_n, d) for d in d_values] + [c_last], None

    def execute(self, session: GroupSession) -> None:
        bus = session.bus
        n = len(session.participants)
        views = self.chain(session)
        c_last = views[n]

        round_no = n
        bus.deliver_round(session.epoch, round_no, [
            session.message(round_no, i, n, [self.d_value(session, i, views[i])], "d-value", [i])
            for i in range(1, n)
        ])
        d_values = [m.payload[0] for m in bus.receive(n, "d-value")]

        terminal = session.member(n)
        terminal.broadcaster = True
        payload, aux = self.reply(session, d_values, c_last)
        slots = list(range(1, n + 1))
        bus.deliver_round(session.epoch, round_no + 1, [
            session.message(round_no + 1, n, BROADCAST, payload, "reply", slots, aux)
        ])
        for i in range(1, n):
            bus.receive_one(i, "reply")
        self.finalize(session, payload, slots, aux)

    def finalize(self, session: GroupSession, payload, slots, aux) -> None:
        finalize_from_vector(session, payload, slots)


class GSAP3Prime(GSAP3):
    tag = "gsap3p"
    title = "GSAP-3′"
    requires = ("linear", "s_is_group")

    def d_value(self, session: GroupSession, index: int, c_last: SElement) -> SElement:
        backend = self.backend
        g = session.member(index).private_g
        return backend.s_combine(backend.s_invert(backend.act(g, backend.base())), c_last)

    def reply(self, session: GroupSession, d_values: List[SElement], c_last: SElement):
        backend = self.backend
        n = len(session.participants)
        g_n = session.member(n).private_g
        d_n = self.d_value(session, n, c_last)
        payload = [backend.act(g_n, d) for d in d_values + [d_n]]
        return payload, backend.act(g_n, backend.base())

    def finalize(self, session: GroupSession, payload, slots, aux) -> None:
        """K = Φ(g_i, Φ(g_n, s)) · Φ(g_n, D_i); the vector and aux are cached."""
        backend = self.backend
        cached = dict(zip(slots, payload))
        for index, user in session.participants.items():
            user.cache = dict(cached)
            user.aux = aux
            key = backend.s_combine(backend.act(user.private_g, aux), cached[index])
            user.set_key(session.epoch, key)


def gsap3_run(backend, n: int, seed: Any = 0,
              private_elements: Optional[Sequence[GElement]] = None) -> SessionResult:
    """Run GSAP-3 (requires inverses in G)."""
    return GSAP3(backend).run(n, seed, private_elements)


def gsap3p_run(backend, n: int, seed: Any = 0,
               private_elements: Optional[Sequence[GElement]] = None) -> SessionResult:
    """Run GSAP-3′ (requires a linear action on a group S)."""
    return GSAP3Prime(backend).run(n, seed, private_elements)
