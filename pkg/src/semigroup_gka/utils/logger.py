import hashlib
import logging
import os
from typing import Optional

LOG_LEVEL_ENV = "SGKA_LOG_LEVEL"
DEFAULT_LEVEL = "WARNING"
_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def resolve_level(level: Optional[str] = None) -> int:
    """Map a level name (or the SGKA_LOG_LEVEL variable) to a logging level."""
    name = (level or os.getenv(LOG_LEVEL_ENV) or DEFAULT_LEVEL).strip().upper()
    value = logging.getLevelName(name)
    if not isinstance(value, int):
        return logging.WARNING
    return value


def setup_logging(level: Optional[str] = None) -> logging.Logger:
    """Configure the package logger once; later calls only adjust the level."""
    logger = logging.getLogger("semigroup_gka")
    logger.setLevel(resolve_level(level))
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False
    return logger


def fingerprint(data: bytes) -> str:
    """Short hex digest used to log keys without printing them."""
    return hashlib.sha256(data).hexdigest()[:12]
