"""Environment settings and scenario files."""
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from .backends import build_backend
from .backends.base import ActionBackend
from .exceptions import ConfigError, GkaError
from .models import BackendDict, EventDict, OutputsDict, ScenarioDict
from .protocols import GSAP4, PROTOCOLS, check_compatible, derive_rng
from .rekeying import EVENT_KINDS, REKEYERS, RekeyEvent
from .utils.logger import DEFAULT_LEVEL, LOG_LEVEL_ENV

SEED_ENV = "SGKA_DEFAULT_SEED"


@dataclass(frozen=True)
class Settings:
    log_level: str = DEFAULT_LEVEL
    default_seed: int = 0


def load_settings(environ: Optional[Dict[str, str]] = None) -> Settings:
    """Settings from the environment (after the CLI has loaded .env)."""
    env = os.environ if environ is None else environ
    raw_seed = env.get(SEED_ENV, "0").strip() or "0"
    try:
        seed = int(raw_seed)
    except ValueError:
        raise ConfigError(f"'{raw_seed}' is not an integer", SEED_ENV) from None
    return Settings(
        log_level=(env.get(LOG_LEVEL_ENV) or DEFAULT_LEVEL).strip().upper(),
        default_seed=seed,
    )


def _int(data: Dict[str, Any], name: str, minimum: int, default: Any = None) -> Optional[int]:
    value = data.get(name, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", name)
    if value < minimum:
        raise ConfigError(f"must be at least {minimum}", name)
    return value


@dataclass
class ScenarioConfig:
    """A validated scenario: protocol, backend, group size, choices, events, outputs."""
    protocol: str
    backend: BackendDict
    n: int
    seed: int = 0
    j: Optional[int] = None
    c: Optional[int] = None
    events: List[EventDict] = field(default_factory=list)
    outputs: OutputsDict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: ScenarioDict, default_seed: int = 0) -> "ScenarioConfig":
        if not isinstance(data, dict):
            raise ConfigError("a scenario must be a JSON object")
        protocol = data.get("protocol")
        if protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {protocol!r} (known: {', '.join(sorted(PROTOCOLS))})", "protocol")
        backend = data.get("backend")
        if not isinstance(backend, dict):
            raise ConfigError("missing backend object", "backend")
        cls_ = PROTOCOLS[protocol]
        n = _int(data, "n", cls_.min_n)
        if n is None:
            raise ConfigError("missing group size", "n")
        seed = _int(data, "seed", 0, default_seed)
        j = _int(data, "j", 1)
        c = _int(data, "c", 1)
        for name, value in (("j", j), ("c", c)):
            if value is not None and value > n:
                raise ConfigError(f"{value} is not a user index in 1..{n}", name)
        if j is not None and cls_ is not GSAP4:
            raise ConfigError("only GSAP-4 has a broadcaster choice", "j")
        if c is not None and protocol == "gsap1" and c != n:
            raise ConfigError("GSAP-1 is rekeyed by the terminal user U_n", "c")

        events = data.get("events", [])
        if not isinstance(events, list):
            raise ConfigError("expected a list", "events")
        if events and protocol not in REKEYERS:
            raise ConfigError(f"{protocol} has no rekeying procedure", "events")
        for number, event in enumerate(events):
            where = f"events[{number}]"
            if not isinstance(event, dict) or event.get("event") not in EVENT_KINDS:
                raise ConfigError(f"event must be one of {', '.join(EVENT_KINDS)}", where)
            if event["event"] == "leave" and not isinstance(event.get("index"), int):
                raise ConfigError("leave needs an integer index", where)
            for key in ("actor", "index", "g_seed", "fresh_seed"):
                if key in event and (isinstance(event[key], bool) or not isinstance(event[key], int)):
                    raise ConfigError(f"{key} must be an integer", where)

        outputs = data.get("outputs", {})
        if not isinstance(outputs, dict) or not all(isinstance(v, str) for v in outputs.values()):
            raise ConfigError("expected an object of file paths", "outputs")
        return cls(protocol, dict(backend), n, seed, j, c, list(events), dict(outputs))

    @classmethod
    def from_file(cls, path: Union[str, Path], default_seed: int = 0) -> "ScenarioConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}", str(path)) from e
        return cls.from_dict(data, default_seed)

    def build_backend(self) -> ActionBackend:
        """The backend, checked against the protocol's capability needs."""
        backend = build_backend(self.backend)
        check_compatible(self.protocol, backend)
        return backend

    def rekey_events(self, backend: ActionBackend) -> List[RekeyEvent]:
        """Events with their g′ / joiner elements resolved from per-event seeds."""
        resolved = []
        for number, event in enumerate(self.events):
            fresh = joiner = None
            if "fresh_seed" in event:
                fresh = backend.sample_g(derive_rng(event["fresh_seed"], "fresh"))
            if "g_seed" in event:
                joiner = backend.sample_g(derive_rng(event["g_seed"], "joiner"))
            actor = event.get("actor")
            try:
                resolved.append(RekeyEvent(
                    kind=event["event"],
                    actor=actor,
                    index=event.get("index"),
                    fresh_g=fresh,
                    joiner_g=joiner,
                    seed=f"{self.seed}/event/{number}",
                ))
            except GkaError as e:
                raise ConfigError(str(e), f"events[{number}]") from e
        return resolved
