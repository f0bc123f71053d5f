"""Flat-file session persistence with per-session locking."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .errors import NotFoundError
from .flow import FlowSession


class SessionStore:
    """One JSON file per session under a state directory.

    Writes are atomic (tmp + rename) and mutating callers hold the
    per-session lock, so concurrent HTTP requests serialize per session.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.Lock()
            return self._locks[session_id]

    def _path(self, session_id: str) -> Path:
        return self.directory / f"{session_id}.json"

    def save(self, session: FlowSession) -> None:
        path = self._path(session.id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(session.to_dict(), indent=2) + "\n", "utf-8")
        os.replace(tmp, path)

    def load(self, session_id: str) -> FlowSession:
        path = self._path(session_id)
        if not path.is_file():
            raise NotFoundError(f"no session '{session_id}'")
        return FlowSession.from_dict(json.loads(path.read_text("utf-8")))

    def exists(self, session_id: str) -> bool:
        return self._path(session_id).is_file()

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))
