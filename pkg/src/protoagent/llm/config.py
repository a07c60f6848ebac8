"""Backend configuration loading.

Config file shape::

    {
      "backend": "mock" | "http",
      "chat":  {"base_url": ..., "model": ..., "temperature": 0.0,
                "seed": 0, "script": "path/to/script.json"},
      "embed": {"base_url": ..., "model": ..., "dim": 256, "seed": 0},
      "max_input_chars": 120000
    }

The API key is never part of the file; it comes from the LLM_API_KEY
environment variable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import BackendError
from .embedding import MOCK_DIM, HashingEmbedder, HttpEmbedder
from .http import HttpChatBackend
from .messages import ChatParams
from .mock import ScriptedChatBackend

DEFAULT_MAX_INPUT_CHARS = 120_000


@dataclass(frozen=True)
class GatewayConfig:
    backend: str = "mock"
    chat: dict = field(default_factory=dict)
    embed: dict = field(default_factory=dict)
    max_input_chars: int = DEFAULT_MAX_INPUT_CHARS

    def chat_params(self) -> ChatParams:
        return ChatParams(temperature=float(self.chat.get("temperature", 0.0)),
                          max_tokens=int(self.chat.get("max_tokens", 1024)),
                          seed=self.chat.get("seed", 0))


def load_gateway_config(path: str | Path) -> GatewayConfig:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise BackendError(f"cannot load backend config {path}: {exc}") from exc
    return gateway_config_from_dict(data)


def gateway_config_from_dict(data: dict) -> GatewayConfig:
    backend = data.get("backend", "mock")
    if backend not in ("mock", "http"):
        raise BackendError(f"unknown backend {backend!r}")
    return GatewayConfig(backend=backend, chat=dict(data.get("chat", {})),
                         embed=dict(data.get("embed", {})),
                         max_input_chars=int(data.get("max_input_chars",
                                                      DEFAULT_MAX_INPUT_CHARS)))


def make_chat_backend(config: GatewayConfig, *, script_path: str | Path | None = None):
    """Build a chat backend; for mock, each call returns a fresh replay."""
    if config.backend == "mock":
        path = script_path or config.chat.get("script")
        if path is None:
            raise BackendError("mock chat backend requires a script file")
        return ScriptedChatBackend.from_file(path)
    base_url = config.chat.get("base_url")
    model = config.chat.get("model")
    if not base_url or not model:
        raise BackendError("http chat backend requires chat.base_url and chat.model")
    return HttpChatBackend(base_url=base_url, model=model,
                           max_input_chars=config.max_input_chars)


def make_embedder(config: GatewayConfig):
    if config.backend == "mock":
        return HashingEmbedder(dim=int(config.embed.get("dim", MOCK_DIM)),
                               seed=int(config.embed.get("seed", 0)))
    base_url = config.embed.get("base_url")
    model = config.embed.get("model")
    if not base_url or not model:
        raise BackendError("http embedder requires embed.base_url and embed.model")
    return HttpEmbedder(base_url=base_url, model=model)
