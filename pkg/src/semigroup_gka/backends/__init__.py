from typing import Any, Callable, Dict

from ..exceptions import ConfigError
from .base import ActionBackend, Capabilities, GElement, SElement
from .matrix_ring import EpmZMBackend
from .modexp import ModExpPrime, RSAModExp
from .presets import preset_config, preset_names

__all__ = [
    'ActionBackend', 'Capabilities', 'GElement', 'SElement',
    'ModExpPrime', 'RSAModExp', 'EpmZMBackend',
    'BACKENDS', 'build_backend', 'preset_names',
]

BACKENDS: Dict[str, Callable[[Dict[str, Any]], ActionBackend]] = {
    ModExpPrime.name: ModExpPrime.from_config,
    RSAModExp.name: RSAModExp.from_config,
    EpmZMBackend.name: EpmZMBackend.from_config,
}


def build_backend(config: Dict[str, Any]) -> ActionBackend:
    """Build a backend from its JSON config; {"preset": name} is expanded first."""
    if not isinstance(config, dict):
        raise ConfigError("backend config must be a JSON object", "backend")
    if "preset" in config:
        merged = preset_config(config["preset"])
        merged.update({k: v for k, v in config.items() if k not in ("preset", "backend")})
        config = merged
    kind = config.get("backend")
    if kind not in BACKENDS:
        raise ConfigError(f"unknown backend '{kind}' (known: {', '.join(sorted(BACKENDS))})", "backend")
    return BACKENDS[kind](config)
