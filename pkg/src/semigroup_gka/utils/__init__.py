from .logger import fingerprint, setup_logging

__all__ = ["fingerprint", "setup_logging"]
