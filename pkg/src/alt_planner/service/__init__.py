from .app import DATA_DIR_ENV, create_app
from .store import Session, SessionStore, validate_session_config

__all__ = ["DATA_DIR_ENV", "Session", "SessionStore", "create_app", "validate_session_config"]
