"""Session persistence: content-addressed blobs plus JSON session records."""

from __future__ import annotations

import dataclasses
import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..audio import Waveform

POLARITIES = ("POS", "NEG")
STATUSES = ("created", "labeled", "extracting", "done", "failed")


@dataclass
class Label:
    start_s: float
    end_s: float
    polarity: str

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Session:
    id: str
    source_blob: str
    duration_s: float
    sample_rate: int
    original_format: dict
    status: str = "created"
    labels: list[Label] = field(default_factory=list)
    pseudo_negative: bool = False
    result_blob: str | None = None
    result_meta: dict = field(default_factory=dict)
    request_fingerprint: str | None = None
    error: str | None = None
    created_at: float = field(default_factory=time.time)
    extract_count: int = 0   # test hook: counts actual model invocations

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["labels"] = [l.to_dict() for l in self.labels]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Session":
        d = dict(d)
        d["labels"] = [Label(**l) for l in d.get("labels", [])]
        return cls(**d)


class SessionStore:
    """Disk-backed store; per-session locks serialize state transitions."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "blobs").mkdir(parents=True, exist_ok=True)
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._ground_truth: dict[str, Waveform] = {}

    # --- blobs ---------------------------------------------------------------

    def put_blob(self, data: bytes, suffix: str = ".wav") -> str:
        digest = hashlib.sha256(data).hexdigest()
        path = self.root / "blobs" / f"{digest}{suffix}"
        if not path.exists():
            path.write_bytes(data)
        return digest

    def blob_path(self, digest: str, suffix: str = ".wav") -> Path:
        path = self.root / "blobs" / f"{digest}{suffix}"
        if not path.exists():
            raise KeyError(f"unknown blob {digest}")
        return path

    # --- sessions ------------------------------------------------------------

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def new_session(self, **kwargs) -> Session:
        session = Session(id=uuid.uuid4().hex[:16], **kwargs)
        self.save(session)
        return session

    def save(self, session: Session) -> None:
        path = self.root / "sessions" / f"{session.id}.json"
        path.write_text(json.dumps(session.to_dict(), indent=1, sort_keys=True))

    def get(self, session_id: str) -> Session:
        path = self.root / "sessions" / f"{session_id}.json"
        if not path.exists():
            raise KeyError(f"unknown session {session_id}")
        return Session.from_dict(json.loads(path.read_text()))

    # --- test hook -------------------------------------------------------------

    def register_ground_truth(self, session_id: str, truth: Waveform) -> None:
        """Attach a known clean target so extraction responses carry metrics."""
        self._ground_truth[session_id] = truth

    def ground_truth(self, session_id: str) -> Waveform | None:
        return self._ground_truth.get(session_id)
