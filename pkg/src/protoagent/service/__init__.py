"""HTTP review service: sessions, proposals, approval, history."""

from .app import create_app
from .manager import Session, SessionManager, document_hash
from .store import PersistedSession, SessionStore

__all__ = [
    "create_app",
    "Session",
    "SessionManager",
    "document_hash",
    "PersistedSession",
    "SessionStore",
]
