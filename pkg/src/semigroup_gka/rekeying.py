"""Refresh, leave and join for established groups.

Three procedures, one per cache layout:

* GSAP-1: the terminal user keeps the upflow chain and reruns the downflow.
* GSAP-2 / GSAP-3: every member caches {Φ(∏_{r≠i} g_r, s)}_i and one actor
  U_c re-acts it with a fresh element g′.
* GSAP-3′: every member caches {Φ(g_i h, s)^{-1} K}_i together with the
  published Φ(h, s).

Every call opens a new epoch on the session's bus and returns the epoch's
SessionResult. Departed indices are never reused.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Union

from .backends.base import ActionBackend, GElement, SElement
from .exceptions import ProtocolError
from .protocols.gsap1 import downflow, previous_slot
from .protocols.gsap2 import finalize_from_vector
from .protocols.session import (
    BROADCAST,
    GroupSession,
    ParticipantState,
    SessionResult,
    Transcript,
    derive_rng,
)

logger = logging.getLogger(__name__)

EVENT_KINDS = ("refresh", "leave", "join")


@dataclass(frozen=True)
class RekeyEvent:
    """One membership or refresh event.

    `fresh_g` is the actor's g′ and `joiner_g` the newcomer's private
    element; either may be omitted and is then drawn from `seed`.
    """
    kind: str
    actor: Optional[int] = None
    index: Optional[int] = None
    fresh_g: Optional[GElement] = None
    joiner_g: Optional[GElement] = None
    seed: Any = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ProtocolError(f"unknown rekey event '{self.kind}'")
        if self.kind == "leave" and self.index is None:
            raise ProtocolError("a leave event names the departing index")

    @classmethod
    def refresh(cls, actor: Optional[int] = None, fresh_g: Optional[GElement] = None, seed: Any = None):
        return cls("refresh", actor=actor, fresh_g=fresh_g, seed=seed)

    @classmethod
    def leave(cls, index: int, actor: Optional[int] = None, fresh_g: Optional[GElement] = None,
              seed: Any = None):
        return cls("leave", actor=actor, index=index, fresh_g=fresh_g, seed=seed)

    @classmethod
    def join(cls, joiner_g: Optional[GElement] = None, actor: Optional[int] = None,
             fresh_g: Optional[GElement] = None, seed: Any = None):
        return cls("join", actor=actor, joiner_g=joiner_g, fresh_g=fresh_g, seed=seed)

    def describe(self) -> str:
        if self.kind == "leave":
            return f"leave({self.index})"
        return self.kind


Target = Union[SessionResult, GroupSession]


def _session(target: Target, protocols) -> GroupSession:
    session = target.session if isinstance(target, SessionResult) else target
    if session.protocol not in protocols:
        raise ProtocolError(f"{session.protocol} sessions cannot be rekeyed this way")
    return session


def _fresh_g(session: GroupSession, event: RekeyEvent) -> GElement:
    if event.fresh_g is not None:
        session.backend.serialize_g(event.fresh_g)
        return event.fresh_g
    seed = session.seed if event.seed is None else event.seed
    return session.backend.sample_g(derive_rng(seed, f"epoch/{session.epoch}/fresh"))


def _joiner_g(session: GroupSession, event: RekeyEvent, index: int) -> GElement:
    if event.joiner_g is not None:
        session.backend.serialize_g(event.joiner_g)
        return event.joiner_g
    seed = session.seed if event.seed is None else event.seed
    return session.backend.sample_g(derive_rng(seed, f"participant/{index}"))


def _begin_epoch(session: GroupSession, event: RekeyEvent) -> None:
    session.epoch += 1
    session.transcript.mark_epoch(session.epoch, event.describe())
    logger.info("%s epoch %d: %s", session.protocol, session.epoch, event.describe())


def _resize(session: GroupSession) -> None:
    for user in session.participants.values():
        user.n = len(session.participants)


def _check_leave(session: GroupSession, index: int, actor: int) -> None:
    if index not in session.participants:
        raise ProtocolError(f"U_{index} is not a current member")
    if index == actor:
        raise ProtocolError(f"U_{index} performs the rekey and cannot be the one leaving")
    if len(session.participants) <= 2:
        raise ProtocolError("a group needs at least two members after a leave")


def _depart(session: GroupSession, index: int) -> ParticipantState:
    user = session.participants.pop(index)
    session.departed[index] = user
    session.bus.unregister(index)
    _resize(session)
    return user


def _admit(session: GroupSession, g: GElement) -> ParticipantState:
    index = session.next_index
    session.next_index += 1
    user = ParticipantState(index=index, n=len(session.participants) + 1, private_g=g)
    session.participants[index] = user
    session.bus.register(index)
    session.key_factors[f"g{index}"] = g
    _resize(session)
    return user


def _finish(session: GroupSession) -> SessionResult:
    return session.finish_epoch(session.ledger_key())


# -- GSAP-1 -------------------------------------------------------------------

def rekey_gsap1(target: Target, event: RekeyEvent) -> SessionResult:
    """Rekey a GSAP-1 group from the terminal user's upflow cache."""
    session = _session(target, ("gsap1",))
    backend = session.backend
    bus = session.bus
    t = session.terminal
    if event.actor is not None and event.actor != t:
        raise ProtocolError(f"GSAP-1 rekeying is done by the terminal user U_{t}, not U_{event.actor}")
    terminal = session.member(t)
    if not terminal.cache:
        raise ProtocolError(f"U_{t} holds no upflow cache")
    if event.kind == "leave":
        _check_leave(session, event.index, t)

    fresh = _fresh_g(session, event)
    _begin_epoch(session, event)
    round_no = 1

    if event.kind == "join":
        chain = [m for m in session.members if m != t]
        last = chain[-1] if chain else 0
        slots = [0] + chain + [t]
        values = [terminal.cache[slot] for slot in [0] + chain]
        values.append(backend.act(terminal.private_g, terminal.cache[last]))
        refreshed = [backend.act(fresh, v) for v in values]
        session.key_factors[f"blind{session.epoch}"] = fresh

        joiner = _admit(session, _joiner_g(session, event, session.next_index))
        bus.deliver_round(session.epoch, round_no, [
            session.message(round_no, t, joiner.index, refreshed, "join", slots)
        ])
        round_no += 1
        message = bus.receive_one(joiner.index, "join")
        joiner.cache = dict(zip(message.slots, message.payload))
        joiner.terminal = True
        terminal.terminal = False
        terminal.cache = {}
        session.terminal = session.actor = joiner.index
        joiner.set_key(session.epoch, backend.act(joiner.private_g, joiner.cache[t]))
        downflow(session, joiner.index, joiner.private_g, joiner.cache, round_no, "rekey")
        return _finish(session)

    if event.kind == "leave":
        chain = [m for m in session.members if m != t]
        leaving = event.index
        followers = chain[chain.index(leaving) + 1:]
        resume = terminal.cache[previous_slot(chain, leaving)]
        _depart(session, leaving)
        del session.key_factors[f"g{leaving}"]
        terminal.cache.pop(leaving, None)

        if followers:
            # the members after U_i redo their part of the upflow without g_i
            bus.deliver_round(session.epoch, round_no, [
                session.message(round_no, t, followers[0], [resume], "resume")
            ])
            round_no += 1
            for k, member in enumerate(followers):
                user = session.member(member)
                if k == 0:
                    incoming = bus.receive_one(member, "resume").payload[0]
                    values: List[SElement] = []
                    slots: List[int] = []
                else:
                    message = bus.receive_one(member, "upflow")
                    values, slots = list(message.payload), list(message.slots)
                    incoming = values[-1]
                values.append(backend.act(user.private_g, incoming))
                slots.append(member)
                recipient = followers[k + 1] if k + 1 < len(followers) else t
                bus.deliver_round(session.epoch, round_no, [
                    session.message(round_no, member, recipient, values, "upflow", slots)
                ])
                round_no += 1
            message = bus.receive_one(t, "upflow")
            terminal.cache.update(zip(message.slots, message.payload))

    # refresh, and the second half of a leave
    terminal.private_g = backend.compose(fresh, terminal.private_g)
    session.key_factors[f"g{t}"] = terminal.private_g
    chain = [m for m in session.members if m != t]
    last = chain[-1] if chain else 0
    terminal.set_key(session.epoch, backend.act(terminal.private_g, terminal.cache[last]))
    downflow(session, t, terminal.private_g, terminal.cache, round_no, "rekey")
    return _finish(session)


# -- GSAP-2 / GSAP-3 ----------------------------------------------------------

def _actor(session: GroupSession, event: RekeyEvent) -> ParticipantState:
    actor = session.actor if event.actor is None else event.actor
    user = session.member(actor)
    if not user.cache or user.derived_key is None:
        raise ProtocolError(f"U_{actor} holds no cached keying vector")
    return user


def rekey_cached(target: Target, event: RekeyEvent) -> SessionResult:
    """Rekey a GSAP-2 or GSAP-3 group from the shared cached vector."""
    session = _session(target, ("gsap2", "gsap3"))
    backend = session.backend
    bus = session.bus
    actor = _actor(session, event)
    c = actor.index
    if event.kind == "leave":
        _check_leave(session, event.index, c)

    fresh = _fresh_g(session, event)
    old_key = actor.derived_key
    _begin_epoch(session, event)

    if event.kind == "leave":
        _depart(session, event.index)
    vector = {
        slot: value if slot == c else backend.act(fresh, value)
        for slot, value in actor.cache.items()
        if slot in session.participants
    }
    actor.private_g = backend.compose(fresh, actor.private_g)
    session.key_factors[f"g{c}"] = actor.private_g

    if event.kind != "join":
        slots = sorted(vector)
        bus.deliver_round(session.epoch, 1, [
            session.message(1, c, BROADCAST, [vector[i] for i in slots], "rekey", slots)
        ])
        for i in session.members:
            if i != c:
                bus.receive_one(i, "rekey")
        finalize_from_vector(session, [vector[i] for i in slots], slots)
        return _finish(session)

    joiner = _admit(session, _joiner_g(session, event, session.next_index))
    vector[joiner.index] = backend.act(fresh, old_key)
    slots = sorted(vector)
    bus.deliver_round(session.epoch, 1, [
        session.message(1, c, joiner.index, [vector[i] for i in slots], "join", slots)
    ])
    message = bus.receive_one(joiner.index, "join")
    final = [
        value if slot == joiner.index else backend.act(joiner.private_g, value)
        for slot, value in zip(message.slots, message.payload)
    ]
    joiner.broadcaster = True
    bus.deliver_round(session.epoch, 2, [
        session.message(2, joiner.index, BROADCAST, final, "rekey", message.slots)
    ])
    for i in session.members:
        if i != joiner.index:
            bus.receive_one(i, "rekey")
    finalize_from_vector(session, final, list(message.slots))
    return _finish(session)


# -- GSAP-3′ ------------------------------------------------------------------

def rekey_gsap3p(target: Target, event: RekeyEvent) -> SessionResult:
    """Rekey a GSAP-3′ group; a join is two consecutive rekeys (U_c's, then the joiner's)."""
    session = _session(target, ("gsap3p",))
    backend = session.backend
    bus = session.bus
    actor = _actor(session, event)
    c = actor.index
    if actor.aux is None:
        raise ProtocolError(f"U_{c} holds no published Φ(h, s)")
    if event.kind == "leave":
        _check_leave(session, event.index, c)

    fresh = _fresh_g(session, event)
    old_key = actor.derived_key
    _begin_epoch(session, event)
    if event.kind == "leave":
        _depart(session, event.index)

    # U_c's own position becomes Φ(g′² g_c, Φ(h, s))^{-1} Φ(g′, K)
    new_key = backend.act(fresh, old_key)
    twice = backend.compose(fresh, backend.compose(fresh, actor.private_g))
    vector = {
        slot: backend.act(fresh, value)
        for slot, value in actor.cache.items()
        if slot in session.participants and slot != c
    }
    vector[c] = backend.s_combine(backend.s_invert(backend.act(twice, actor.aux)), new_key)
    aux = backend.act(fresh, actor.aux)
    actor.private_g = backend.compose(fresh, actor.private_g)
    session.key_factors[f"g{c}"] = actor.private_g
    slots = sorted(vector)

    if event.kind != "join":
        bus.deliver_round(session.epoch, 1, [
            session.message(1, c, BROADCAST, [vector[i] for i in slots], "rekey", slots, aux)
        ])
        _finalize_gsap3p(session, c, "rekey")
        return _finish(session)

    joiner = _admit(session, _joiner_g(session, event, session.next_index))
    bus.deliver_round(session.epoch, 1, [
        session.message(1, c, BROADCAST, [vector[i] for i in slots], "rekey", slots, aux),
        session.message(1, c, joiner.index, [new_key], "join"),
    ])
    first = bus.receive_one(joiner.index, "rekey")
    blinded_key = bus.receive_one(joiner.index, "join").payload[0]
    g_j = joiner.private_g
    final = [backend.act(g_j, value) for value in first.payload]
    final.append(backend.s_combine(
        backend.s_invert(backend.act(backend.compose(g_j, g_j), first.aux)),
        backend.act(g_j, blinded_key),
    ))
    final_slots = list(first.slots) + [joiner.index]
    joiner.broadcaster = True
    bus.deliver_round(session.epoch, 2, [
        session.message(2, joiner.index, BROADCAST, final, "rekey", final_slots,
                        backend.act(g_j, first.aux))
    ])
    for i in session.members:
        if i != joiner.index:
            bus.receive(i, "rekey")
    _apply_gsap3p(session, final, final_slots, backend.act(g_j, first.aux))
    return _finish(session)


def _finalize_gsap3p(session: GroupSession, sender: int, step: str) -> None:
    received = [session.bus.receive_one(i, step) for i in session.members if i != sender]
    message = received[-1]
    _apply_gsap3p(session, list(message.payload), list(message.slots), message.aux)


def _apply_gsap3p(session: GroupSession, vector, slots, aux) -> None:
    backend = session.backend
    cached = dict(zip(slots, vector))
    for index, user in session.participants.items():
        user.cache = dict(cached)
        user.aux = aux
        user.set_key(session.epoch, backend.s_combine(backend.act(user.private_g, aux), cached[index]))


# -- dispatch and replay ------------------------------------------------------

REKEYERS = {
    "gsap1": rekey_gsap1,
    "gsap2": rekey_cached,
    "gsap3": rekey_cached,
    "gsap3p": rekey_gsap3p,
}


def rekey(target: Target, event: RekeyEvent) -> SessionResult:
    """Apply `event` with the procedure matching the session's protocol."""
    session = target.session if isinstance(target, SessionResult) else target
    try:
        procedure = REKEYERS[session.protocol]
    except KeyError:
        raise ProtocolError(f"{session.protocol} has no rekeying procedure") from None
    return procedure(session, event)


def replay_finalize(backend: ActionBackend, private_g: GElement, transcript: Transcript,
                    aux: Optional[SElement] = None) -> List[SElement]:
    """Every value a holder of `private_g` derives by finalizing against `transcript`.

    Payload elements are acted on directly; where a message (or the caller)
    supplies an auxiliary Φ(h, s), the GSAP-3′ finalize form is tried too.
    """
    derived: List[SElement] = []
    combine = backend.capabilities.s_is_abelian_semigroup
    for message in transcript.messages:
        extra = message.aux if message.aux is not None else aux
        for element in message.payload:
            derived.append(backend.act(private_g, element))
            if extra is not None and combine:
                derived.append(backend.s_combine(backend.act(private_g, extra), element))
    return derived


def epoch_keys(session: GroupSession) -> Dict[int, SElement]:
    return dict(session.epoch_keys)
