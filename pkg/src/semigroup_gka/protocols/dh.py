from dataclasses import dataclass

from ..backends.base import ActionBackend, GElement, SElement


@dataclass(frozen=True)
class DHExchange:
    """Public values and the shared secret of a two-party exchange."""
    alice_public: SElement
    bob_public: SElement
    alice_shared: SElement
    bob_shared: SElement

    @property
    def agreed(self) -> bool:
        return self.alice_shared == self.bob_shared


def dh_exchange(backend: ActionBackend, a: GElement, b: GElement) -> DHExchange:
    """Alice publishes Φ(a, s), Bob Φ(b, s); both end with Φ(ab, s)."""
    s = backend.base()
    alice_public = backend.act(a, s)
    bob_public = backend.act(b, s)
    return DHExchange(
        alice_public=alice_public,
        bob_public=bob_public,
        alice_shared=backend.act(a, bob_public),
        bob_shared=backend.act(b, alice_public),
    )
