"""Network-facing inference: sessions, labels, extraction, results."""

from .app import create_app, session_json
from .engine import (
    ModelRegistry,
    ServiceConfig,
    ServiceError,
    assemble_enrollments,
    decode_upload,
    run_extraction,
    validate_labels,
    wav_bytes,
)
from .store import Label, Session, SessionStore

__all__ = [
    "Label",
    "ModelRegistry",
    "ServiceConfig",
    "ServiceError",
    "Session",
    "SessionStore",
    "assemble_enrollments",
    "create_app",
    "decode_upload",
    "run_extraction",
    "session_json",
    "validate_labels",
    "wav_bytes",
]
