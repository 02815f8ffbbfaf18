"""The ring E_p^(m) and the linear action of Z[M] on Z_p x Z_p^2 x ... x Z_p^m.

Row i (1-based) of an E_p^(m) matrix lives mod p^i and its entries left of
the diagonal are multiples of p^(i-j). Elements of G are polynomials in a
public matrix M with scalar coefficients c*I, so any two of them commute.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from ..exceptions import BackendMismatchError, ConfigError
from .base import ActionBackend, Capabilities, decode_ints, encode_ints

logger = logging.getLogger(__name__)

Rows = Tuple[Tuple[int, ...], ...]


def _check_shape(p: int, m: int) -> None:
    if p < 2 or m < 1:
        raise ValueError(f"E_p^(m) needs p >= 2 and m >= 1, got p={p}, m={m}")


@dataclass(frozen=True)
class EpmMatrix:
    """An element of E_p^(m), entries stored as plain reduced integers."""
    p: int
    m: int
    rows: Rows

    def __post_init__(self):
        _check_shape(self.p, self.m)
        if len(self.rows) != self.m or any(len(row) != self.m for row in self.rows):
            raise ValueError(f"expected a {self.m}x{self.m} matrix")
        for i, row in enumerate(self.rows, start=1):
            modulus = self.p ** i
            for j, entry in enumerate(row, start=1):
                if not 0 <= entry < modulus:
                    raise ValueError(f"entry ({i},{j})={entry} not reduced mod {modulus}")
                if i > j and entry % self.p ** (i - j):
                    raise ValueError(
                        f"entry ({i},{j})={entry} is not a multiple of {self.p ** (i - j)}"
                    )

    @classmethod
    def reduce(cls, p: int, m: int, rows: Sequence[Sequence[int]]) -> "EpmMatrix":
        """Reduce row i mod p^i and validate the result."""
        return cls(p, m, tuple(
            tuple(entry % p ** i for entry in row) for i, row in enumerate(rows, start=1)
        ))

    @classmethod
    def zero(cls, p: int, m: int) -> "EpmMatrix":
        return cls(p, m, tuple((0,) * m for _ in range(m)))

    @classmethod
    def identity(cls, p: int, m: int) -> "EpmMatrix":
        return cls.scalar(p, m, 1)

    @classmethod
    def scalar(cls, p: int, m: int, c: int) -> "EpmMatrix":
        return cls.reduce(p, m, [[c if i == j else 0 for j in range(m)] for i in range(m)])

    @classmethod
    def random(cls, p: int, m: int, rng: random.Random) -> "EpmMatrix":
        rows = []
        for i in range(1, m + 1):
            row = []
            for j in range(1, m + 1):
                if i > j:
                    row.append(p ** (i - j) * rng.randrange(p ** j))
                else:
                    row.append(rng.randrange(p ** i))
            rows.append(tuple(row))
        return cls(p, m, tuple(rows))

    def _same_ring(self, other: "EpmMatrix") -> None:
        if (self.p, self.m) != (other.p, other.m):
            raise BackendMismatchError(
                f"E_{self.p}^({self.m}) and E_{other.p}^({other.m}) do not mix"
            )

    def __add__(self, other: "EpmMatrix") -> "EpmMatrix":
        self._same_ring(other)
        return EpmMatrix.reduce(self.p, self.m, [
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)
        ])

    def __mul__(self, other: "EpmMatrix") -> "EpmMatrix":
        self._same_ring(other)
        cols = list(zip(*other.rows))
        return EpmMatrix.reduce(self.p, self.m, [
            [sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows
        ])

    def __pow__(self, exponent: int) -> "EpmMatrix":
        if exponent < 0:
            raise ValueError("negative powers are not defined in E_p^(m)")
        result = EpmMatrix.identity(self.p, self.m)
        square = self
        while exponent:
            if exponent & 1:
                result = result * square
            square = square * square
            exponent >>= 1
        return result

    def apply(self, v: "ModuleVector") -> "ModuleVector":
        if (self.p, self.m) != (v.p, v.m):
            raise BackendMismatchError("matrix and vector dimensions differ")
        return ModuleVector.reduce(self.p, self.m, [
            sum(a * x for a, x in zip(row, v.components)) for row in self.rows
        ])

    def entries(self) -> List[int]:
        return [entry for row in self.rows for entry in row]

    def to_lists(self) -> List[List[int]]:
        return [list(row) for row in self.rows]


@dataclass(frozen=True)
class ModuleVector:
    """An element of Z_p x Z_p^2 x ... x Z_p^m."""
    p: int
    m: int
    components: Tuple[int, ...]

    def __post_init__(self):
        _check_shape(self.p, self.m)
        if len(self.components) != self.m:
            raise ValueError(f"expected {self.m} components")
        for i, x in enumerate(self.components, start=1):
            if not 0 <= x < self.p ** i:
                raise ValueError(f"component {i}={x} not reduced mod {self.p ** i}")

    @classmethod
    def reduce(cls, p: int, m: int, components: Sequence[int]) -> "ModuleVector":
        return cls(p, m, tuple(x % p ** i for i, x in enumerate(components, start=1)))

    @classmethod
    def zero(cls, p: int, m: int) -> "ModuleVector":
        return cls(p, m, (0,) * m)

    @classmethod
    def random(cls, p: int, m: int, rng: random.Random) -> "ModuleVector":
        return cls(p, m, tuple(rng.randrange(p ** i) for i in range(1, m + 1)))

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        if (self.p, self.m) != (other.p, other.m):
            raise BackendMismatchError("vector dimensions differ")
        return ModuleVector.reduce(self.p, self.m, [a + b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "ModuleVector":
        return ModuleVector.reduce(self.p, self.m, [-x for x in self.components])

    def is_zero(self) -> bool:
        return not any(self.components)


@dataclass(frozen=True)
class ZMElement:
    """Σ c_i M^i with scalar coefficients; equality is on the evaluated matrix.

    `coeffs` is empty when the element was rebuilt from its matrix alone.
    """
    base: EpmMatrix = field(compare=False)
    coeffs: Tuple[int, ...] = field(compare=False)
    matrix: EpmMatrix

    def __repr__(self) -> str:
        return f"ZMElement(coeffs={list(self.coeffs)}, matrix={self.matrix.to_lists()})"


def ring_add(a: EpmMatrix, b: EpmMatrix) -> EpmMatrix:
    return a + b


def ring_mul(a: EpmMatrix, b: EpmMatrix) -> EpmMatrix:
    return a * b


def zm_make(M: EpmMatrix, coeffs: Sequence[int]) -> ZMElement:
    """Evaluate Σ coeffs[i]·M^i by Horner's rule."""
    if not coeffs:
        raise ValueError("a Z[M] element needs at least one coefficient")
    reduced = tuple(c % M.p ** M.m for c in coeffs)
    result = EpmMatrix.scalar(M.p, M.m, reduced[-1])
    for c in reversed(reduced[:-1]):
        result = result * M + EpmMatrix.scalar(M.p, M.m, c)
    return ZMElement(M, reduced, result)


def zm_mul(z1: ZMElement, z2: ZMElement) -> ZMElement:
    coeffs: Tuple[int, ...] = ()
    if z1.coeffs and z2.coeffs:
        modulus = z1.base.p ** z1.base.m
        product = [0] * (len(z1.coeffs) + len(z2.coeffs) - 1)
        for i, a in enumerate(z1.coeffs):
            for j, b in enumerate(z2.coeffs):
                product[i + j] = (product[i + j] + a * b) % modulus
        coeffs = tuple(product)
    return ZMElement(z1.base, coeffs, z1.matrix * z2.matrix)


def zm_act(z: ZMElement, v: ModuleVector) -> ModuleVector:
    return z.matrix.apply(v)


@dataclass(frozen=True)
class PeriodResult:
    """Smallest (index, period) with M^(index+period) = M^index, or exceeded."""
    index: int = 0
    period: int = 0
    exceeded: bool = False


def period_of(M: EpmMatrix, cap: int) -> PeriodResult:
    """Cycle detection over M, M^2, ... up to M^cap."""
    seen = {}
    power = M
    for exponent in range(1, cap + 1):
        if power in seen:
            first = seen[power]
            return PeriodResult(index=first, period=exponent - first)
        seen[power] = exponent
        power = power * M
    return PeriodResult(exceeded=True)


def choose_generator(p: int, m: int, rng: random.Random, threshold: int = 16,
                     cap: int = 4096, max_attempts: int = 500) -> EpmMatrix:
    """Rejection-sample M until its period reaches `threshold`.

    Falls back to the longest period seen after `max_attempts` draws.
    """
    best, best_period = None, 0
    for _ in range(max_attempts):
        candidate = EpmMatrix.random(p, m, rng)
        result = period_of(candidate, cap)
        period = cap if result.exceeded else result.period
        if period >= threshold:
            return candidate
        if period > best_period:
            best, best_period = candidate, period
    logger.warning(
        "No M in E_%d^(%d) reached period %d after %d draws; using period %d",
        p, m, threshold, max_attempts, best_period,
    )
    return best if best is not None else EpmMatrix.identity(p, m)


class EpmZMBackend(ActionBackend):
    """G = Z[M] ⊂ E_p^(m) acting linearly on the additive group of module vectors."""

    name = "epm-zm"

    def __init__(self, M: EpmMatrix, s: ModuleVector, degree: int = 3):
        if (M.p, M.m) != (s.p, s.m):
            raise ConfigError("M and s live over different E_p^(m)", "s")
        if degree < 0:
            raise ConfigError("degree must be non-negative", "degree")
        self.M = M
        self.p = M.p
        self.m = M.m
        self.s = s
        self.degree = degree
        super().__init__(Capabilities(
            g_has_inverses=False,
            s_is_group=True,
            s_is_abelian_semigroup=True,
            linear=True,
            s_order_known=self.p ** (self.m * (self.m + 1) // 2),
        ))

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "EpmZMBackend":
        try:
            p, m = int(config["p"]), int(config["m"])
        except KeyError as e:
            raise ConfigError("missing parameter", str(e.args[0])) from e
        rng = random.Random(config.get("seed", 0))
        try:
            if config.get("M") is not None:
                M = EpmMatrix.reduce(p, m, config["M"])
            else:
                M = choose_generator(
                    p, m, rng,
                    threshold=int(config.get("period_threshold", 16)),
                    cap=int(config.get("period_cap", 4096)),
                )
            if config.get("s") is not None:
                s = ModuleVector.reduce(p, m, config["s"])
            else:
                s = ModuleVector.random(p, m, rng)
                while s.is_zero():
                    s = ModuleVector.random(p, m, rng)
        except ValueError as e:
            raise ConfigError(str(e), "M") from e
        return cls(M, s, degree=int(config.get("degree", 3)))

    def public_config(self) -> Dict[str, Any]:
        return {
            "backend": self.name,
            "p": self.p,
            "m": self.m,
            "M": self.M.to_lists(),
            "s": list(self.s.components),
            "degree": self.degree,
        }

    def zm(self, coeffs: Sequence[int]):
        """The G element Σ coeffs[i]·M^i."""
        return self.wrap_g(zm_make(self.M, coeffs))

    def vector(self, components: Sequence[int]):
        return self.wrap_s(ModuleVector.reduce(self.p, self.m, components))

    def _act(self, g: ZMElement, s: ModuleVector) -> ModuleVector:
        return zm_act(g, s)

    def _compose(self, g: ZMElement, h: ZMElement) -> ZMElement:
        return zm_mul(g, h)

    def _g_identity(self) -> ZMElement:
        return zm_make(self.M, [1])

    def _g_scalar(self, k: int) -> ZMElement:
        return zm_make(self.M, [k])

    def _sample_g(self, rng: random.Random) -> ZMElement:
        modulus = self.p ** self.m
        return zm_make(self.M, [rng.randrange(modulus) for _ in range(self.degree + 1)])

    def _enumerate_g(self) -> Iterator[ZMElement]:
        seen = set()
        for coeffs in itertools.product(range(self.p ** self.m), repeat=self.degree + 1):
            z = zm_make(self.M, coeffs)
            if z.matrix not in seen:
                seen.add(z.matrix)
                yield z

    def _base(self) -> ModuleVector:
        return self.s

    def _s_combine(self, x: ModuleVector, y: ModuleVector) -> ModuleVector:
        return x + y

    def _s_invert(self, x: ModuleVector) -> ModuleVector:
        return -x

    def _s_identity(self) -> ModuleVector:
        return ModuleVector.zero(self.p, self.m)

    def _encode_g(self, g: ZMElement) -> bytes:
        return encode_ints(g.matrix.entries())

    def _decode_g(self, data: bytes) -> ZMElement:
        entries = decode_ints(data)
        if len(entries) != self.m * self.m:
            raise ValueError(f"expected {self.m * self.m} matrix entries")
        matrix = EpmMatrix(self.p, self.m, tuple(
            tuple(entries[i * self.m:(i + 1) * self.m]) for i in range(self.m)
        ))
        if matrix * self.M != self.M * matrix:
            raise ValueError("matrix does not commute with M, so it is not in Z[M]")
        return ZMElement(self.M, (), matrix)

    def _encode_s(self, s: ModuleVector) -> bytes:
        return encode_ints(s.components)

    def _decode_s(self, data: bytes) -> ModuleVector:
        return ModuleVector(self.p, self.m, tuple(decode_ints(data)))
