from typing import Any, Dict, Optional, Sequence, Type

from ..backends.base import ActionBackend, GElement
from ..exceptions import ConfigError
from .base import GroupKeyProtocol
from .bus import BusRecord, DeliveryStatus, MessageBus
from .dh import DHExchange, dh_exchange
from .gsap1 import GSAP1, gsap1_run
from .gsap2 import GSAP2, gsap2_run
from .gsap3 import GSAP3, GSAP3Prime, gsap3_run, gsap3p_run
from .gsap4 import GSAP4, gsap4_run
from .session import (
    BROADCAST,
    GroupSession,
    ParticipantState,
    ProtocolMessage,
    SessionResult,
    Transcript,
    derive_rng,
)

__all__ = [
    'GroupKeyProtocol', 'GSAP1', 'GSAP2', 'GSAP3', 'GSAP3Prime', 'GSAP4',
    'gsap1_run', 'gsap2_run', 'gsap3_run', 'gsap3p_run', 'gsap4_run',
    'dh_exchange', 'DHExchange', 'MessageBus', 'BusRecord', 'DeliveryStatus',
    'BROADCAST', 'GroupSession', 'ParticipantState', 'ProtocolMessage',
    'SessionResult', 'Transcript', 'derive_rng', 'PROTOCOLS', 'protocol_class',
    'check_compatible', 'run_protocol',
]

PROTOCOLS: Dict[str, Type[GroupKeyProtocol]] = {
    cls.tag: cls for cls in (GSAP1, GSAP2, GSAP3, GSAP3Prime, GSAP4)
}


def protocol_class(name: str) -> Type[GroupKeyProtocol]:
    try:
        return PROTOCOLS[name]
    except KeyError:
        raise ConfigError(
            f"unknown protocol '{name}' (known: {', '.join(sorted(PROTOCOLS))})", "protocol"
        ) from None


def check_compatible(name: str, backend: ActionBackend) -> None:
    """Capability gate: raises UnsupportedCapabilityError if `name` cannot run on `backend`."""
    protocol_class(name).check_backend(backend)


def run_protocol(name: str, backend: ActionBackend, n: int, seed: Any = 0,
                 private_elements: Optional[Sequence[GElement]] = None,
                 j: Optional[int] = None) -> SessionResult:
    cls = protocol_class(name)
    protocol = cls(backend, j) if cls is GSAP4 else cls(backend)
    return protocol.run(n, seed, private_elements)
