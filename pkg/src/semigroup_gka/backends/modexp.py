"""Exponentiation backends: Φ(y, x) = x^y.

ModExpPrime acts with exponents mod a prime q on the order-q subgroup of
Z_p^*. RSAModExp acts with units mod φ(m) on the multiplicative semigroup
mod m = pq; only the dealer knows φ(m).
"""
import logging
import math
import random
from typing import Any, Dict, Iterator, Optional

import sympy

from ..exceptions import ConfigError, UnsupportedCapabilityError
from .base import ActionBackend, Capabilities, decode_int, encode_int

logger = logging.getLogger(__name__)


class ModExpPrime(ActionBackend):
    """G = Z_q^* under multiplication, S = <s> of prime order q in Z_p^*."""

    name = "modexp-prime"

    def __init__(self, p: int, q: int, s: int):
        if not sympy.isprime(p):
            raise ConfigError(f"{p} is not prime", "p")
        if not sympy.isprime(q):
            raise ConfigError(f"{q} is not prime", "q")
        if (p - 1) % q != 0:
            raise ConfigError(f"q={q} does not divide p-1", "q")
        if not (1 < s < p) or pow(s, q, p) != 1:
            raise ConfigError(f"s={s} does not generate the order-{q} subgroup", "s")
        self.p = p
        self.q = q
        self.s = s
        super().__init__(Capabilities(
            g_has_inverses=True,
            s_is_group=True,
            s_is_abelian_semigroup=True,
            linear=True,
            s_order_known=q,
        ))

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "ModExpPrime":
        try:
            return cls(int(config["p"]), int(config["q"]), int(config["s"]))
        except KeyError as e:
            raise ConfigError("missing parameter", str(e.args[0])) from e

    @classmethod
    def generate(cls, bits: int, seed: int) -> "ModExpPrime":
        """Safe-prime parameters p = 2q + 1 of the given size, deterministic in seed."""
        if bits < 8:
            raise ConfigError("at least 8 bits are needed", "bits")
        rng = random.Random(seed)
        candidate = rng.getrandbits(bits - 1) | (1 << (bits - 2))
        while True:
            q = int(sympy.nextprime(candidate))
            p = 2 * q + 1
            if sympy.isprime(p):
                break
            candidate = q
        while True:
            s = pow(rng.randrange(2, p - 1), 2, p)
            if s != 1:
                break
        logger.debug("Generated %d-bit safe prime parameters from seed %s", p.bit_length(), seed)
        return cls(p, q, s)

    def public_config(self) -> Dict[str, Any]:
        return {"backend": self.name, "p": self.p, "q": self.q, "s": self.s}

    def contains_s(self, x: int) -> bool:
        """True when x lies in the order-q subgroup."""
        return 0 < x < self.p and pow(x, self.q, self.p) == 1

    def g_from_int(self, k: int):
        """Exponent k as an element of G (k reduced mod q, never 0)."""
        k %= self.q
        if k == 0:
            raise ValueError(f"exponent is 0 mod q={self.q}")
        return self.wrap_g(k)

    def s_from_int(self, x: int):
        if not self.contains_s(x):
            raise ValueError(f"{x} is not in the order-{self.q} subgroup mod {self.p}")
        return self.wrap_s(x)

    def _act(self, g: int, s: int) -> int:
        return pow(s, g, self.p)

    def _compose(self, g: int, h: int) -> int:
        return (g * h) % self.q

    def _g_identity(self) -> int:
        return 1

    def _g_invert(self, g: int) -> int:
        return pow(g, -1, self.q)

    def _g_scalar(self, k: int) -> int:
        return self.g_from_int(k).value

    def _sample_g(self, rng: random.Random) -> int:
        return rng.randrange(1, self.q)

    def _enumerate_g(self) -> Iterator[int]:
        return iter(range(1, self.q))

    def _base(self) -> int:
        return self.s

    def _s_combine(self, x: int, y: int) -> int:
        return (x * y) % self.p

    def _s_invert(self, x: int) -> int:
        return pow(x, -1, self.p)

    def _s_identity(self) -> int:
        return 1

    def _encode_g(self, g: int) -> bytes:
        return encode_int(g)

    def _decode_g(self, data: bytes) -> int:
        g = decode_int(data)
        if not 0 < g < self.q:
            raise ValueError(f"exponent {g} outside 1..{self.q - 1}")
        return g

    def _encode_s(self, s: int) -> bytes:
        return encode_int(s)

    def _decode_s(self, data: bytes) -> int:
        x = decode_int(data)
        if not self.contains_s(x):
            raise ValueError(f"{x} is not in the order-{self.q} subgroup")
        return x


class RSAModExp(ActionBackend):
    """G = Z_φ(m)^*, S = (Z_m, ·), Φ(x, g) = g^x mod m.

    Built from the primes (dealer view) it can sample and invert exponents;
    built from m alone (public view) it can only act and combine.
    """

    name = "rsa-modexp"

    def __init__(self, m: int, s: int, phi: Optional[int] = None,
                 primes: Optional[tuple] = None):
        if m < 6:
            raise ConfigError("modulus too small", "m")
        if not (1 < s < m):
            raise ConfigError(f"base {s} outside 2..{m - 1}", "s")
        self.m = m
        self.s = s
        self._phi = phi
        self._primes = primes
        # only the dealer, who knows phi(m), can invert or sample exponents
        super().__init__(Capabilities(
            g_has_inverses=phi is not None,
            s_is_group=False,
            s_is_abelian_semigroup=True,
            linear=True,
            s_order_known=None,
        ))

    @classmethod
    def from_primes(cls, p: int, q: int, s: int) -> "RSAModExp":
        if p == q or not sympy.isprime(p) or not sympy.isprime(q):
            raise ConfigError("p and q must be distinct primes", "p")
        return cls(p * q, s, phi=(p - 1) * (q - 1), primes=(p, q))

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "RSAModExp":
        try:
            if "p" in config and "q" in config:
                return cls.from_primes(int(config["p"]), int(config["q"]), int(config["s"]))
            return cls(int(config["m"]), int(config["s"]))
        except KeyError as e:
            raise ConfigError("missing parameter", str(e.args[0])) from e

    @classmethod
    def generate(cls, bits: int, seed: int, s: int = 2) -> "RSAModExp":
        """Dealer parameters with two primes of bits//2 bits each."""
        rng = random.Random(seed)
        half = max(bits // 2, 4)
        p = int(sympy.nextprime(rng.getrandbits(half) | (1 << (half - 1))))
        q = int(sympy.nextprime(rng.getrandbits(half) | (1 << (half - 1))))
        while q == p:
            q = int(sympy.nextprime(q))
        return cls.from_primes(p, q, s)

    @property
    def is_dealer(self) -> bool:
        return self._phi is not None

    def public_config(self) -> Dict[str, Any]:
        return {"backend": self.name, "m": self.m, "s": self.s}

    def config(self) -> Dict[str, Any]:
        if self._primes is None:
            return self.public_config()
        p, q = self._primes
        return {"backend": self.name, "p": p, "q": q, "s": self.s}

    def public_view(self) -> "RSAModExp":
        return RSAModExp(self.m, self.s)

    def _need_phi(self, context: str) -> int:
        if self._phi is None:
            raise UnsupportedCapabilityError("order of G (phi(m))", self.name, context)
        return self._phi

    def g_from_int(self, k: int):
        if k < 1:
            raise ValueError("exponents must be positive")
        if self._phi is not None:
            if math.gcd(k, self._phi) != 1:
                raise ValueError(f"{k} is not a unit mod phi(m)")
            k %= self._phi
        return self.wrap_g(k)

    def s_from_int(self, x: int):
        if not 0 <= x < self.m:
            raise ValueError(f"{x} outside Z_{self.m}")
        return self.wrap_s(x)

    def _act(self, g: int, s: int) -> int:
        return pow(s, g, self.m)

    def _compose(self, g: int, h: int) -> int:
        # m is squarefree and exponents stay >= 1, so reducing mod phi(m)
        # does not change the action on non-units either.
        if self._phi is None:
            return g * h
        return (g * h) % self._phi

    def _g_identity(self) -> int:
        return 1

    def _g_invert(self, g: int) -> int:
        return pow(g, -1, self._need_phi("g_invert"))

    def _sample_g(self, rng: random.Random) -> int:
        phi = self._need_phi("sample_g")
        while True:
            k = rng.randrange(1, phi)
            if math.gcd(k, phi) == 1:
                return k

    def _enumerate_g(self) -> Iterator[int]:
        k = 1
        while True:
            if self._phi is None or math.gcd(k, self._phi) == 1:
                yield k
            k += 1
            if self._phi is not None and k >= self._phi:
                return

    def _base(self) -> int:
        return self.s

    def _s_combine(self, x: int, y: int) -> int:
        return (x * y) % self.m

    def _encode_g(self, g: int) -> bytes:
        return encode_int(g)

    def _decode_g(self, data: bytes) -> int:
        g = decode_int(data)
        if g < 1:
            raise ValueError("exponent must be positive")
        return g

    def _encode_s(self, s: int) -> bytes:
        return encode_int(s)

    def _decode_s(self, data: bytes) -> int:
        x = decode_int(data)
        if x >= self.m:
            raise ValueError(f"{x} outside Z_{self.m}")
        return x
