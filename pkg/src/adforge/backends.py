"""Chat-completion backends: a minimal HTTP contract and a replay mock.

The HTTP contract is a single JSON POST: `{"model": ..., "messages":
[{"role": ..., "content": ...}]}` answered by `{"text": ...}`. The mock
replays recorded replies keyed by the SHA-256 of the latest user message,
so fixture runs are deterministic and need no network.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import requests

from .errors import BackendError, ValidationError

Message = dict[str, str]  # {"role": "user"|"assistant", "text": ...}

DEFAULT_TOKEN_ENV = "ADFORGE_BACKEND_TOKEN"


@dataclass
class LLMBackendConfig:
    endpoint: str
    model: str
    auth_env: str | None = None  # name of the env var holding the token
    timeout_s: float = 60.0
    max_retries: int = 2

    def validate(self) -> None:
        if not self.endpoint:
            raise ValidationError("backend endpoint must be set")
        if self.timeout_s <= 0:
            raise ValidationError("backend timeout must be positive")
        if self.max_retries < 0:
            raise ValidationError("backend retries must be non-negative")


class Backend(Protocol):
    def complete(self, messages: list[Message]) -> str: ...


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class HttpBackend:
    """POSTs the conversation to a chat-completion endpoint, with retries."""

    def __init__(self, config: LLMBackendConfig):
        config.validate()
        self.config = config

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_env:
            token = os.environ.get(self.config.auth_env)
            if not token:
                raise BackendError(0, f"auth environment variable {self.config.auth_env} is not set")
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: list[Message]) -> str:
        payload = {
            "model": self.config.model,
            "messages": [{"role": m["role"], "content": m["text"]} for m in messages],
        }
        last_status, last_body = 0, "no request sent"
        for _ in range(self.config.max_retries + 1):
            try:
                resp = requests.post(
                    self.config.endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.config.timeout_s,
                )
            except requests.RequestException as exc:
                last_status, last_body = 0, str(exc)
                continue
            if resp.status_code == 200:
                try:
                    return resp.json()["text"]
                except (ValueError, KeyError):
                    raise BackendError(200, f"malformed backend response: {resp.text[:200]}") from None
            last_status, last_body = resp.status_code, resp.text
            if 400 <= resp.status_code < 500:
                break  # client errors will not improve with retries
        raise BackendError(last_status, last_body)


class MockBackend:
    """Replays recorded replies; raises when a prompt was never recorded."""

    def __init__(self, entries: dict[str, str]):
        self.entries = dict(entries)

    def complete(self, messages: list[Message]) -> str:
        users = [m for m in messages if m["role"] == "user"]
        if not users:
            raise BackendError(0, "mock backend needs at least one user message")
        digest = prompt_digest(users[-1]["text"])
        if digest not in self.entries:
            preview = users[-1]["text"].splitlines()[0][:80] if users[-1]["text"] else ""
            raise BackendError(0, f"no recorded reply for prompt {digest[:12]} ({preview!r})")
        return self.entries[digest]

    @classmethod
    def from_pairs(cls, pairs: list[tuple[str, str]]) -> "MockBackend":
        return cls({prompt_digest(prompt): reply for prompt, reply in pairs})

    @classmethod
    def from_transcript(cls, turns: list[Message]) -> "MockBackend":
        """Rebuild a mock from a recorded session transcript."""
        pairs = []
        for prev, turn in zip(turns, turns[1:]):
            if prev["role"] == "user" and turn["role"] == "assistant":
                pairs.append((prev["text"], turn["text"]))
        return cls.from_pairs(pairs)

    @classmethod
    def load(cls, path: str | Path) -> "MockBackend":
        data = json.loads(Path(path).read_text("utf-8"))
        return cls({e["prompt_sha256"]: e["reply"] for e in data["entries"]})

    def save(self, path: str | Path, previews: dict[str, str] | None = None) -> None:
        entries = []
        for digest in sorted(self.entries):
            entry = {"prompt_sha256": digest, "reply": self.entries[digest]}
            if previews and digest in previews:
                entry["prompt_preview"] = previews[digest]
            entries.append(entry)
        Path(path).write_text(json.dumps({"entries": entries}, indent=2) + "\n", "utf-8")


def make_backend(spec: str | LLMBackendConfig, model: str = "default",
                 auth_env: str | None = None) -> Backend:
    """Build a backend from a config object or a `mock:<path>` / URL string."""
    if isinstance(spec, LLMBackendConfig):
        return HttpBackend(spec)
    if spec.startswith("mock:"):
        return MockBackend.load(spec[len("mock:"):])
    if auth_env is None and os.environ.get(DEFAULT_TOKEN_ENV):
        auth_env = DEFAULT_TOKEN_ENV  # bare-URL backends pick up the standard token
    return HttpBackend(LLMBackendConfig(endpoint=spec, model=model, auth_env=auth_env))
