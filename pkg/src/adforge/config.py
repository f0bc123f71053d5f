"""Application configuration for the CLI and HTTP service."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import yaml

from .backends import DEFAULT_TOKEN_ENV, LLMBackendConfig
from .errors import ValidationError


@dataclass
class AppConfig:
    state_dir: str = "sessions"
    backend: str | LLMBackendConfig | None = None  # "mock:<path>" or HTTP config
    catalog_path: str | None = None  # None -> bundled snapshot
    host: str = "127.0.0.1"
    port: int = 8080
    log_level: str = "info"
    ui_dir: str | None = None

    def validate(self) -> None:
        if self.backend is None:
            raise ValidationError("exactly one backend must be configured (mock:<path> or an endpoint)")
        state = Path(self.state_dir)
        state.mkdir(parents=True, exist_ok=True)
        if not os.access(state, os.W_OK):
            raise ValidationError(f"state directory {state} is not writable")

    @classmethod
    def from_dict(cls, data: dict) -> "AppConfig":
        backend = data.get("backend")
        if isinstance(backend, dict):
            backend = LLMBackendConfig(
                endpoint=backend.get("endpoint", ""),
                model=backend.get("model", "default"),
                auth_env=backend.get("auth_env", DEFAULT_TOKEN_ENV),
                timeout_s=float(backend.get("timeout_s", 60.0)),
                max_retries=int(backend.get("max_retries", 2)),
            )
        listen = data.get("listen", "")
        host, port = cls.host, cls.port
        if listen:
            host, _, port_s = listen.rpartition(":")
            port = int(port_s)
        return cls(
            state_dir=data.get("state_dir", cls.state_dir),
            backend=backend,
            catalog_path=data.get("catalog"),
            host=host or cls.host,
            port=port,
            log_level=data.get("log_level", cls.log_level),
            ui_dir=data.get("ui_dir"),
        )

    @classmethod
    def load(cls, path: str | Path) -> "AppConfig":
        return cls.from_dict(yaml.safe_load(Path(path).read_text("utf-8")) or {})
