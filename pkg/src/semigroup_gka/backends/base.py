import hashlib
import json
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from ..exceptions import BackendMismatchError, UnsupportedCapabilityError


@dataclass(frozen=True)
class Capabilities:
    """What the algebra behind a backend offers to the protocols."""
    g_has_inverses: bool
    s_is_group: bool
    s_is_abelian_semigroup: bool
    linear: bool
    s_order_known: Optional[int] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "g_has_inverses": self.g_has_inverses,
            "s_is_group": self.s_is_group,
            "s_is_abelian_semigroup": self.s_is_abelian_semigroup,
            "linear": self.linear,
            "s_order_known": self.s_order_known,
        }


@dataclass(frozen=True)
class GElement:
    """An element of the acting semigroup G, tagged with its backend."""
    backend: str
    value: Any

    def __repr__(self) -> str:
        return f"GElement({self.value!r})"


@dataclass(frozen=True)
class SElement:
    """An element of the set S acted upon, tagged with its backend."""
    backend: str
    value: Any

    def __repr__(self) -> str:
        return f"SElement({self.value!r})"


# Canonical byte form: every integer is a 2-byte length followed by its
# minimal big-endian encoding (zero encodes as the empty string).

def encode_int(value: int) -> bytes:
    if value < 0:
        raise ValueError("only non-negative residues are encoded")
    raw = value.to_bytes((value.bit_length() + 7) // 8, "big")
    if len(raw) > 0xFFFF:
        raise ValueError("integer too large to encode")
    return len(raw).to_bytes(2, "big") + raw


def encode_ints(values: Sequence[int]) -> bytes:
    return len(values).to_bytes(2, "big") + b"".join(encode_int(v) for v in values)


def _read_int(data: bytes, offset: int) -> Tuple[int, int]:
    if offset + 2 > len(data):
        raise ValueError("truncated length prefix")
    size = int.from_bytes(data[offset:offset + 2], "big")
    start = offset + 2
    end = start + size
    if end > len(data):
        raise ValueError("truncated integer")
    raw = data[start:end]
    if raw[:1] == b"\x00":
        raise ValueError("non-minimal integer encoding")
    return int.from_bytes(raw, "big"), end


def decode_int(data: bytes) -> int:
    value, end = _read_int(data, 0)
    if end != len(data):
        raise ValueError("trailing bytes after integer")
    return value


def decode_ints(data: bytes) -> List[int]:
    if len(data) < 2:
        raise ValueError("truncated count prefix")
    count = int.from_bytes(data[:2], "big")
    values = []
    offset = 2
    for _ in range(count):
        value, offset = _read_int(data, offset)
        values.append(value)
    if offset != len(data):
        raise ValueError("trailing bytes after integer list")
    return values


class ActionBackend(ABC):
    """A commutative semigroup G acting on a set S through Φ.

    Concrete backends implement the underscore hooks on raw values; the
    public methods check that elements belong to this backend instance and
    that the required capability is declared.
    """

    name: str = "abstract"

    def __init__(self, capabilities: Capabilities):
        self.capabilities = capabilities
        self._fingerprint: Optional[str] = None

    # -- identity and configuration ---------------------------------------

    @abstractmethod
    def public_config(self) -> Dict[str, Any]:
        """Config a passive observer may know (no trapdoors)."""

    def config(self) -> Dict[str, Any]:
        """Full config, including dealer-only parameters if any."""
        return self.public_config()

    @property
    def params(self) -> Dict[str, Any]:
        return {k: v for k, v in self.public_config().items() if k != "backend"}

    @property
    def descriptor(self) -> str:
        shown = ", ".join(f"{k}={v}" for k, v in self.params.items() if not isinstance(v, list))
        return f"{self.name}({shown})"

    @property
    def fingerprint(self) -> str:
        if self._fingerprint is None:
            blob = json.dumps(self.public_config(), sort_keys=True, separators=(",", ":"))
            self._fingerprint = hashlib.sha256(blob.encode()).hexdigest()[:16]
        return self._fingerprint

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.descriptor}>"

    # -- raw hooks ----------------------------------------------------------

    @abstractmethod
    def _act(self, g: Any, s: Any) -> Any: ...

    @abstractmethod
    def _compose(self, g: Any, h: Any) -> Any: ...

    @abstractmethod
    def _g_identity(self) -> Any: ...

    @abstractmethod
    def _sample_g(self, rng: random.Random) -> Any: ...

    @abstractmethod
    def _base(self) -> Any: ...

    @abstractmethod
    def _encode_g(self, g: Any) -> bytes: ...

    @abstractmethod
    def _decode_g(self, data: bytes) -> Any: ...

    @abstractmethod
    def _encode_s(self, s: Any) -> bytes: ...

    @abstractmethod
    def _decode_s(self, data: bytes) -> Any: ...

    @abstractmethod
    def _enumerate_g(self) -> Iterator[Any]: ...

    def _g_invert(self, g: Any) -> Any:
        raise UnsupportedCapabilityError("g_has_inverses", self.name)

    def _s_combine(self, x: Any, y: Any) -> Any:
        raise UnsupportedCapabilityError("s_is_abelian_semigroup", self.name)

    def _s_invert(self, x: Any) -> Any:
        raise UnsupportedCapabilityError("s_is_group", self.name)

    def _s_identity(self) -> Any:
        raise UnsupportedCapabilityError("s_is_group", self.name)

    def _g_scalar(self, k: int) -> Any:
        raise UnsupportedCapabilityError("g_scalar", self.name)

    # -- element plumbing -----------------------------------------------------

    def wrap_g(self, value: Any) -> GElement:
        return GElement(self.fingerprint, value)

    def wrap_s(self, value: Any) -> SElement:
        return SElement(self.fingerprint, value)

    def _own_g(self, g: GElement) -> Any:
        if not isinstance(g, GElement) or g.backend != self.fingerprint:
            raise BackendMismatchError(f"{g!r} does not belong to {self.descriptor}")
        return g.value

    def _own_s(self, s: SElement) -> Any:
        if not isinstance(s, SElement) or s.backend != self.fingerprint:
            raise BackendMismatchError(f"{s!r} does not belong to {self.descriptor}")
        return s.value

    def require(self, capability: str, context: str = "") -> None:
        """Raise UnsupportedCapabilityError unless the named capability is set."""
        if capability == "s_order_known":
            ok = self.capabilities.s_order_known is not None
        else:
            ok = bool(getattr(self.capabilities, capability))
        if not ok:
            raise UnsupportedCapabilityError(capability, self.name, context)

    # -- the action -------------------------------------------------------------

    def act(self, g: GElement, s: SElement) -> SElement:
        """Φ(g, s)"""
        return self.wrap_s(self._act(self._own_g(g), self._own_s(s)))

    def compose(self, g: GElement, h: GElement) -> GElement:
        """The product gh in G"""
        return self.wrap_g(self._compose(self._own_g(g), self._own_g(h)))

    def compose_all(self, elements: Iterable[GElement]) -> GElement:
        result = self.g_identity()
        for g in elements:
            result = self.compose(result, g)
        return result

    def act_all(self, elements: Iterable[GElement], s: SElement) -> SElement:
        """Φ(∏ elements, s) computed one factor at a time; empty product gives s."""
        for g in elements:
            s = self.act(g, s)
        return s

    def g_identity(self) -> GElement:
        return self.wrap_g(self._g_identity())

    def g_invert(self, g: GElement) -> GElement:
        self.require("g_has_inverses", "g_invert")
        return self.wrap_g(self._g_invert(self._own_g(g)))

    def g_scalar(self, k: int) -> GElement:
        """The element of G acting on S as the integer multiple/power k."""
        return self.wrap_g(self._g_scalar(k))

    def base(self) -> SElement:
        """The public element s every protocol starts from."""
        return self.wrap_s(self._base())

    def sample_g(self, rng: random.Random) -> GElement:
        """Draw from the commuting generator family; deterministic in rng."""
        return self.wrap_g(self._sample_g(rng))

    def enumerate_g(self, bound: int) -> Iterator[GElement]:
        """At most `bound` elements of the generator family, in a fixed order."""
        for count, value in enumerate(self._enumerate_g()):
            if count >= bound:
                return
            yield self.wrap_g(value)

    # -- S-side algebra -------------------------------------------------------

    def s_combine(self, x: SElement, y: SElement) -> SElement:
        self.require("s_is_abelian_semigroup", "s_combine")
        return self.wrap_s(self._s_combine(self._own_s(x), self._own_s(y)))

    def s_combine_all(self, elements: Sequence[SElement]) -> SElement:
        if not elements:
            raise ValueError("s_combine_all needs at least one element")
        result = elements[0]
        for x in elements[1:]:
            result = self.s_combine(result, x)
        return result

    def s_invert(self, x: SElement) -> SElement:
        self.require("s_is_group", "s_invert")
        return self.wrap_s(self._s_invert(self._own_s(x)))

    def s_identity(self) -> SElement:
        self.require("s_is_group", "s_identity")
        return self.wrap_s(self._s_identity())

    # -- serialization ----------------------------------------------------------

    def serialize_g(self, g: GElement) -> bytes:
        return self._encode_g(self._own_g(g))

    def deserialize_g(self, data: bytes) -> GElement:
        try:
            return self.wrap_g(self._decode_g(bytes(data)))
        except (ValueError, TypeError) as e:
            raise ValueError(f"invalid G element for {self.name}: {e}") from e

    def serialize_s(self, s: SElement) -> bytes:
        return self._encode_s(self._own_s(s))

    def deserialize_s(self, data: bytes) -> SElement:
        try:
            return self.wrap_s(self._decode_s(bytes(data)))
        except (ValueError, TypeError) as e:
            raise ValueError(f"invalid S element for {self.name}: {e}") from e

    def g_hex(self, g: GElement) -> str:
        return self.serialize_g(g).hex()

    def s_hex(self, s: SElement) -> str:
        return self.serialize_s(s).hex()

    def g_from_hex(self, text: str) -> GElement:
        return self.deserialize_g(bytes.fromhex(text))

    def s_from_hex(self, text: str) -> SElement:
        return self.deserialize_s(bytes.fromhex(text))
