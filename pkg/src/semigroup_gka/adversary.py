"""Passive-eavesdropper tooling.

* `label_transcript` explains every transmitted element through the private
  elements (test instrumentation only) and flags the group key.
* `attack_gsap4` recovers a GSAP-4 key from the public D values when the
  order of S is public and prime to n - 2.
* `solve_sap_bruteforce` / `break_via_sap` search the generator family and
  turn a SAP solution into the session key.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .backends import build_backend
from .backends.base import ActionBackend, GElement, SElement
from .exceptions import FullSetLeakError, ProtocolError, UnlabeledElementError
from .protocols.session import ProtocolMessage, Transcript

logger = logging.getLogger(__name__)

PURE = "pure"
QUOTIENT = "quotient"
CROSS_SUM = "cross-sum"


@dataclass(frozen=True)
class SubsetLabel:
    """How an observed element is built from the private elements.

    pure:      Φ(∏_{r∈subset} g_r, s)
    quotient:  Φ(∏_{r∈inverse} g_r, s)^{-1} · Φ(∏_{r∈subset} g_r, s), with g_pivot
               counted twice in the inverse when a pivot is set
    cross-sum: ∏_{r∈subset} Φ(g_pivot g_r, s)
    """
    seq: int
    position: int
    element: SElement
    subset: FrozenSet[int]
    form: str = PURE
    inverse: FrozenSet[int] = frozenset()
    pivot: Optional[int] = None

    def describe(self) -> str:
        members = ",".join(str(i) for i in sorted(self.subset)) or "∅"
        if self.form == QUOTIENT:
            repeated = sorted(self.inverse) + ([self.pivot] if self.pivot is not None else [])
            inverse = ",".join(str(i) for i in sorted(repeated)) or "∅"
            return f"Φ({{{inverse}}})^-1·Φ({{{members}}})"
        if self.form == CROSS_SUM:
            return f"∏ Φ(g_{self.pivot} g_r) over {{{members}}}"
        return f"{{{members}}}"


class _Oracle:
    """Tables of every candidate form, keyed by canonical bytes."""

    def __init__(self, backend: ActionBackend, private_keys: Dict[int, GElement]):
        self.backend = backend
        self.indices = sorted(private_keys)
        self.keys = private_keys
        self.full = frozenset(self.indices)
        s = backend.base()
        self.pure: Dict[FrozenSet[int], SElement] = {}
        for size in range(len(self.indices) + 1):
            for subset in itertools.combinations(self.indices, size):
                self.pure[frozenset(subset)] = backend.act_all((private_keys[i] for i in subset), s)
        self.by_value: Dict[bytes, List[FrozenSet[int]]] = {}
        for subset, value in self.pure.items():
            self.by_value.setdefault(backend.serialize_s(value), []).append(subset)
        self._quotients: Optional[Dict[bytes, Tuple[FrozenSet[int], FrozenSet[int], Optional[int]]]] = None
        self._cross: Optional[Dict[bytes, Tuple[int, FrozenSet[int]]]] = None

    def quotients(self) -> Dict[bytes, Tuple[FrozenSet[int], FrozenSet[int], Optional[int]]]:
        if self._quotients is None:
            self._quotients = {}
            caps = self.backend.capabilities
            if caps.s_is_group and caps.s_is_abelian_semigroup:
                for inverse, pivot, denominator in self._denominators():
                    inverted = self.backend.s_invert(denominator)
                    for subset, numerator in self.pure.items():
                        value = self.backend.s_combine(inverted, numerator)
                        self._quotients.setdefault(self.backend.serialize_s(value), (inverse, subset, pivot))
        return self._quotients

    def _denominators(self):
        """Φ(∏_T g, s) for non-empty T, then the same with one member of T applied twice."""
        for inverse, value in self.pure.items():
            if inverse:
                yield inverse, None, value
        for inverse, value in self.pure.items():
            for pivot in sorted(inverse):
                yield inverse, pivot, self.backend.act(self.keys[pivot], value)

    def cross_sums(self) -> Dict[bytes, Tuple[int, FrozenSet[int]]]:
        if self._cross is None:
            self._cross = {}
            if self.backend.capabilities.s_is_abelian_semigroup:
                s = self.backend.base()
                for pivot in self.indices:
                    others = [r for r in self.indices if r != pivot]
                    terms = {r: self.backend.act(self.backend.compose(self.keys[pivot], self.keys[r]), s)
                             for r in others}
                    for size in range(1, len(others)):
                        for subset in itertools.combinations(others, size):
                            value = self.backend.s_combine_all([terms[r] for r in subset])
                            self._cross.setdefault(self.backend.serialize_s(value), (pivot, frozenset(subset)))
        return self._cross


def label_transcript(transcript: Transcript, backend: ActionBackend,
                     private_keys: Dict[int, GElement]) -> List[SubsetLabel]:
    """Label every payload and auxiliary element of `transcript`.

    Pure values get the smallest proper subset T that reproduces them.
    Raises FullSetLeakError when an element is reproduced only by the full
    set (it is the group key) and UnlabeledElementError when no form fits.
    """
    oracle = _Oracle(backend, private_keys)
    labels = []
    for message, position, element in transcript.elements():
        raw = backend.serialize_s(element)
        matches = oracle.by_value.get(raw, [])
        proper = sorted((t for t in matches if t != oracle.full), key=lambda t: (len(t), sorted(t)))
        if proper:
            labels.append(SubsetLabel(message.seq, position, element, proper[0]))
            continue
        if matches:
            logger.warning("message #%d position %d carries the group key", message.seq, position)
            raise FullSetLeakError(message.seq, position)
        if raw in oracle.quotients():
            inverse, subset, pivot = oracle.quotients()[raw]
            labels.append(SubsetLabel(message.seq, position, element, subset, QUOTIENT, inverse, pivot))
            continue
        if raw in oracle.cross_sums():
            pivot, subset = oracle.cross_sums()[raw]
            labels.append(SubsetLabel(message.seq, position, element, subset, CROSS_SUM, pivot=pivot))
            continue
        raise UnlabeledElementError(
            f"message #{message.seq} position {position} matches no subset or composite form"
        )
    return labels


def contains_key(transcript: Transcript, backend: ActionBackend, key: SElement) -> bool:
    """Byte comparison of every transmitted element against `key`."""
    raw = backend.serialize_s(key)
    return any(backend.serialize_s(e) == raw for _, _, e in transcript.elements())


# -- GSAP-4 -------------------------------------------------------------------

@dataclass(frozen=True)
class AttackResult:
    feasible: bool
    key: Optional[SElement] = None
    reason: str = ""


def _gsap4_d_message(transcript: Transcript) -> ProtocolMessage:
    found = [m for m in transcript.messages if m.protocol == "gsap4" and m.step == "d-values"]
    if len(found) != 1:
        raise ProtocolError(f"expected one GSAP-4 second-round broadcast, found {len(found)}")
    return found[0]


def attack_gsap4(transcript: Transcript, backend: Optional[ActionBackend] = None,
                 n: Optional[int] = None, order: Optional[int] = None) -> AttackResult:
    """Recover K from ∏ D_i = K^{n-2} when the order of S is known and prime to n - 2.

    Only the transcript is needed; the backend is rebuilt from its public
    parameters unless given, so an RSA modulus arrives without φ(m).
    """
    if backend is None:
        backend = build_backend(transcript.public_params)
    message = _gsap4_d_message(transcript)
    size = len(message.payload) + 1
    if n is not None and n != size:
        raise ProtocolError(f"the transcript is from a group of {size}, not {n}")
    order = backend.capabilities.s_order_known if order is None else order
    if order is None:
        return AttackResult(False, reason="the order of S is not public")
    if math.gcd(size - 2, order) != 1:
        return AttackResult(False, reason=f"n-2={size - 2} is not invertible modulo {order}")
    product = backend.s_combine_all(list(message.payload))
    root = backend.g_scalar(pow(size - 2, -1, order))
    key = backend.act(root, product)
    logger.info("GSAP-4 key recovered from %d public values", len(message.payload))
    return AttackResult(True, key)


# -- SAP ----------------------------------------------------------------------

def solve_sap_bruteforce(backend: ActionBackend, x: SElement, y: SElement,
                         bound: int) -> Optional[GElement]:
    """First g among `bound` enumerated elements with Φ(g, x) = y, else None."""
    for tried, g in enumerate(backend.enumerate_g(bound), 1):
        if backend.act(g, x) == y:
            logger.debug("SAP solved after %d candidates", tried)
            return g
    return None


def solve_dhsap_via_sap(backend: ActionBackend, s: SElement, x: SElement, y: SElement,
                        bound: int) -> Optional[SElement]:
    """Given Φ(a, s) = x and Φ(b, s) = y, return Φ(ab, s) through a SAP solution."""
    g = solve_sap_bruteforce(backend, s, x, bound)
    return None if g is None else backend.act(g, y)


def reduction_pair(transcript: Transcript) -> Tuple[SElement, SElement]:
    """(Φ(g_1, s), value U_1 finalizes with) for a GSAP-1, GSAP-2 or GSAP-3 epoch-0 transcript."""
    messages = [m for m in transcript.messages if m.epoch == 0]
    if not messages:
        raise ProtocolError("empty transcript")
    protocol = messages[0].protocol

    def one(candidates: Iterable[ProtocolMessage]) -> ProtocolMessage:
        found = list(candidates)
        if not found:
            raise ProtocolError(f"{protocol} transcript is missing a step")
        return found[-1]

    if protocol == "gsap1":
        first = one(m for m in messages if m.step == "upflow" and m.sender == 1)
        last = one(m for m in messages if m.step == "downflow" and m.recipient == 1)
        return first.payload[0], last.slot_value(1)
    if protocol == "gsap2":
        first = one(m for m in messages if m.step == "upflow" and m.sender == 1)
        broadcast = one(m for m in messages if m.step == "broadcast")
        return first.payload[1], broadcast.slot_value(1)
    if protocol == "gsap3":
        first = one(m for m in messages if m.step.startswith("chain") and m.sender == 1)
        reply = one(m for m in messages if m.step == "reply")
        return first.payload[0], reply.slot_value(1)
    raise ProtocolError(f"no SAP reduction for {protocol}")


def break_via_sap(transcript: Transcript, backend: ActionBackend, bound: int) -> Optional[SElement]:
    """Solve SAP on (s, Φ(g_1, s)) and finalize as U_1 would: the session key, or None."""
    c1, finalize_input = reduction_pair(transcript)
    g = solve_sap_bruteforce(backend, backend.base(), c1, bound)
    return None if g is None else backend.act(g, finalize_input)
