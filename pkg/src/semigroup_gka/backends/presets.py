"""Named parameter sets for the backends.

toy-23 and toy-209 are the hand-checkable vectors; desk-64 is generated
deterministically with sympy and is large enough that accidental value
collisions do not disturb the structural checks; modp-2048 is the RFC 3526
group 14 prime (a safe prime, so 4 generates the subgroup of order (p-1)/2).
"""
from functools import lru_cache
from typing import Any, Dict

from ..exceptions import ConfigError

MODP_2048_P = int(
    """
    FFFFFFFF FFFFFFFF C90FDAA2 2168C234 C4C6628B 80DC1CD1
    29024E08 8A67CC74 020BBEA6 3B139B22 514A0879 8E3404DD
    EF9519B3 CD3A431B 302B0A6D F25F1437 4FE1356D 6D51C245
    E485B576 625E7EC6 F44C42E9 A637ED6B 0BFF5CB6 F406B7ED
    EE386BFB 5A899FA5 AE9F2411 7C4B1FE6 49286651 ECE45B3D
    C2007CB8 A163BF05 98DA4836 1C55D39A 69163FA8 FD24CF5F
    83655D23 DCA3AD96 1C62F356 208552BB 9ED52907 7096966D
    670C354E 4ABC9804 F1746C08 CA18217C 32905E46 2E36CE3B
    E39E772C 180E8603 9B2783A2 EC07A28F B5C55DF0 6F4C52C9
    DE2BCBF6 95581718 3995497C EA956AE5 15D22618 98FA0510
    15728E5A 8AACAA68 FFFFFFFF FFFFFFFF
    """.replace(" ", "").replace("\n", ""),
    16,
)

DESK_64_SEED = 20240917

PRESETS: Dict[str, Dict[str, Any]] = {
    "toy-23": {"backend": "modexp-prime", "p": 23, "q": 11, "s": 4},
    "toy-7": {"backend": "modexp-prime", "p": 7, "q": 3, "s": 2},
    "modp-2048": {
        "backend": "modexp-prime",
        "p": MODP_2048_P,
        "q": (MODP_2048_P - 1) // 2,
        "s": 4,
    },
    "toy-209": {"backend": "rsa-modexp", "p": 11, "q": 19, "s": 2},
    "epm-toy": {"backend": "epm-zm", "p": 2, "m": 2, "M": [[1, 1], [2, 3]], "s": [1, 2], "degree": 2},
    "epm-desk": {"backend": "epm-zm", "p": 2, "m": 3, "seed": 3, "degree": 3, "period_threshold": 16},
}

GENERATED = {
    "desk-64": ("modexp-prime", 64, DESK_64_SEED),
    "rsa-desk-64": ("rsa-modexp", 64, DESK_64_SEED),
}


@lru_cache(maxsize=None)
def _generated_config(name: str) -> Dict[str, Any]:
    from .modexp import ModExpPrime, RSAModExp

    kind, bits, seed = GENERATED[name]
    if kind == "modexp-prime":
        return ModExpPrime.generate(bits, seed).config()
    return RSAModExp.generate(bits, seed).config()


def preset_names():
    return sorted(set(PRESETS) | set(GENERATED))


def preset_config(name: str) -> Dict[str, Any]:
    """The backend config registered under `name` (a fresh copy)."""
    if name in PRESETS:
        return dict(PRESETS[name])
    if name in GENERATED:
        return dict(_generated_config(name))
    raise ConfigError(f"unknown preset '{name}' (known: {', '.join(preset_names())})", "preset")
