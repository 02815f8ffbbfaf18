"""ElGamal-type public key encryption over a linear action on a group S.

Bob publishes Φ(b, s); Alice encrypts m as (Φ(a, s), m · Φ(a, Φ(b, s)))
and Bob recovers m = d · Φ(b, c)^{-1}. Messages are elements of S.
"""
from dataclasses import dataclass
from typing import Any, List, Optional, Tuple

from .backends.base import ActionBackend, GElement, SElement
from .exceptions import ProtocolError
from .protocols.session import SessionResult, derive_rng


@dataclass(frozen=True)
class ElGamalKeyPair:
    private: GElement
    public: SElement
    base: SElement


@dataclass(frozen=True)
class ElGamalCiphertext:
    c: SElement
    d: SElement


def _check(backend: ActionBackend) -> None:
    backend.require("s_is_group", "ElGamal")
    backend.require("linear", "ElGamal")


def eg_keygen(backend: ActionBackend, seed: Any = 0, private: Optional[GElement] = None,
              base: Optional[SElement] = None) -> ElGamalKeyPair:
    """Key pair (b, Φ(b, base)); b is drawn from `seed` unless given."""
    _check(backend)
    base = backend.base() if base is None else base
    if private is None:
        private = backend.sample_g(derive_rng(seed, "elgamal/key"))
    return ElGamalKeyPair(private, backend.act(private, base), base)


def eg_encrypt(backend: ActionBackend, public: SElement, message: SElement, seed: Any = 0,
               ephemeral: Optional[GElement] = None, base: Optional[SElement] = None) -> ElGamalCiphertext:
    _check(backend)
    base = backend.base() if base is None else base
    if ephemeral is None:
        ephemeral = backend.sample_g(derive_rng(seed, "elgamal/ephemeral"))
    return ElGamalCiphertext(
        c=backend.act(ephemeral, base),
        d=backend.s_combine(message, backend.act(ephemeral, public)),
    )


def eg_decrypt(backend: ActionBackend, keypair: ElGamalKeyPair, ciphertext: ElGamalCiphertext) -> SElement:
    _check(backend)
    mask = backend.act(keypair.private, ciphertext.c)
    return backend.s_combine(ciphertext.d, backend.s_invert(mask))


def gsap3p_elgamal_pairs(result: SessionResult) -> List[Tuple[int, ElGamalCiphertext]]:
    """Read a GSAP-3′ reply as ciphertexts of the group key.

    With base s^{-1}, the pair (Φ(g_n, s)^{-1}, Φ(g_n, D_i)) is an encryption
    of the key under U_i's public key Φ(g_i, s^{-1}), so U_i (or anyone
    holding g_i) decrypts it with `eg_decrypt` and `keypair_for_pairs`.
    """
    if result.protocol != "gsap3p":
        raise ProtocolError(f"{result.protocol} transcripts carry no ElGamal pairs")
    backend = result.backend
    replies = [m for m in result.transcript.messages if m.step == "reply" and m.aux is not None]
    if len(replies) != 1:
        raise ProtocolError("expected exactly one GSAP-3′ reply in the transcript")
    reply = replies[0]
    c = backend.s_invert(reply.aux)
    return [(slot, ElGamalCiphertext(c, value)) for slot, value in zip(reply.slots, reply.payload)]


def keypair_for_pairs(backend: ActionBackend, private: GElement) -> ElGamalKeyPair:
    """U_i's key pair over the inverted base s^{-1}."""
    base = backend.s_invert(backend.base())
    return eg_keygen(backend, private=private, base=base)
