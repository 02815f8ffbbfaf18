"""
Semigroup GKA - group key agreement over commutative semigroup actions
"""

__version__ = "0.1.0"

from .backends import ActionBackend, EpmZMBackend, ModExpPrime, RSAModExp, build_backend
from .exceptions import (
    BackendMismatchError,
    ConfigError,
    FullSetLeakError,
    GkaError,
    InvariantViolation,
    ProtocolError,
    TranscriptFormatError,
    UnlabeledElementError,
    UnsupportedCapabilityError,
)
from .main import ScenarioOutcome, ScenarioRunner, run_scenario
from .protocols import PROTOCOLS, SessionResult, Transcript, run_protocol
from .rekeying import RekeyEvent, rekey

__all__ = [
    'ActionBackend', 'ModExpPrime', 'RSAModExp', 'EpmZMBackend', 'build_backend',
    'GkaError', 'BackendMismatchError', 'ConfigError', 'ProtocolError',
    'UnsupportedCapabilityError', 'InvariantViolation', 'FullSetLeakError',
    'UnlabeledElementError', 'TranscriptFormatError',
    'PROTOCOLS', 'SessionResult', 'Transcript', 'run_protocol',
    'RekeyEvent', 'rekey', 'ScenarioOutcome', 'ScenarioRunner', 'run_scenario',
]
