"""HTTP API over an immutable in-memory catalog."""

from .app import create_app
from .state import ServiceState, load_state

__all__ = ["create_app", "ServiceState", "load_state"]
