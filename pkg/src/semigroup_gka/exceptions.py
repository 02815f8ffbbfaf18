"""Error hierarchy shared by the library and the CLI.

Library code raises these; only ``cli.py`` turns them into exit codes.
"""


class GkaError(Exception):
    """Base class for every error raised by semigroup_gka"""


class BackendMismatchError(GkaError, ValueError):
    """An element was handed to a backend instance that did not produce it"""


class UnsupportedCapabilityError(GkaError):
    """The backend lacks a capability the operation or protocol needs"""

    def __init__(self, capability: str, backend: str = "", context: str = ""):
        self.capability = capability
        self.backend = backend
        self.context = context
        where = f" ({context})" if context else ""
        on = f" on backend '{backend}'" if backend else ""
        super().__init__(f"capability '{capability}' is not available{on}{where}")


class ProtocolError(GkaError, ValueError):
    """Bad protocol input: group size, member index, actor, round order, cache"""


class ConfigError(GkaError, ValueError):
    """Malformed backend or scenario configuration"""

    def __init__(self, message: str, field: str = ""):
        self.field = field
        prefix = f"{field}: " if field else ""
        super().__init__(f"{prefix}{message}")


class InvariantViolation(GkaError):
    """A protocol invariant checked at run time does not hold"""


class FullSetLeakError(InvariantViolation):
    """A transmitted element equals the action of the full private product"""

    def __init__(self, seq: int, position: int):
        self.seq = seq
        self.position = position
        super().__init__(
            f"message #{seq} position {position} carries the full-set value (the group key)"
        )


class UnlabeledElementError(InvariantViolation):
    """A transcript element matches neither a subset nor a known composite form"""


class TranscriptFormatError(GkaError, ValueError):
    """A transcript file could not be parsed"""

    def __init__(self, message: str, line: int = 0, field: str = ""):
        self.line = line
        self.field = field
        location = []
        if line:
            location.append(f"line {line}")
        if field:
            location.append(f"field '{field}'")
        where = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{where}")
