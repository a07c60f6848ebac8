"""Deterministic scripted chat backend for tests and offline evaluation.

A script is a JSON list of exchanges.  Each exchange matches one incoming
``chat`` call (by ordinal position or by prompt digest) and replies with a
sequence of assistant messages played out over consecutive calls, which is
how multi-step tool-calling turns are scripted.  An unmatched prompt raises
ScriptMiss instead of fabricating a reply.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import ScriptMissError
from .messages import ChatMessage, ChatParams, ToolSchema, conversation_digest


@dataclass(frozen=True)
class ScriptedExchange:
    reply: tuple[ChatMessage, ...]
    ordinal: int | None = None
    prompt_digest: str | None = None

    def to_json(self) -> dict:
        match: dict = {}
        if self.ordinal is not None:
            match["ordinal"] = self.ordinal
        if self.prompt_digest is not None:
            match["prompt_digest"] = self.prompt_digest
        return {"match": match, "reply": [m.to_json() for m in self.reply]}

    @classmethod
    def from_json(cls, data: dict) -> "ScriptedExchange":
        match = data.get("match", {})
        reply = tuple(ChatMessage.from_json(m) for m in data["reply"])
        if not reply:
            raise ValueError("scripted exchange must have at least one reply message")
        return cls(reply=reply, ordinal=match.get("ordinal"),
                   prompt_digest=match.get("prompt_digest"))


def load_script(path: str | Path) -> list[ScriptedExchange]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [ScriptedExchange.from_json(item) for item in data]


def save_script(exchanges: list[ScriptedExchange], path: str | Path) -> None:
    payload = [e.to_json() for e in exchanges]
    Path(path).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                          encoding="utf-8")


class ScriptedChatBackend:
    """Replays a fixed script; pure, so replays are byte-identical."""

    def __init__(self, exchanges: list[ScriptedExchange]):
        self._exchanges = list(exchanges)
        self.reset()

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedChatBackend":
        return cls(load_script(path))

    def reset(self) -> None:
        self._next_exchange = 0
        self._pending: list[ChatMessage] = []
        self.calls = 0

    def chat(self, messages: list[ChatMessage], tools: list[ToolSchema] = (),
             params: ChatParams = ChatParams()) -> ChatMessage:
        self.calls += 1
        if self._pending:
            return self._pending.pop(0)
        if self._next_exchange >= len(self._exchanges):
            raise ScriptMissError(
                f"script exhausted after {self._next_exchange} exchanges")
        exchange = self._exchanges[self._next_exchange]
        ordinal = self._next_exchange + 1
        if exchange.ordinal is not None and exchange.ordinal != ordinal:
            raise ScriptMissError(
                f"exchange expects ordinal {exchange.ordinal}, call is {ordinal}")
        if exchange.prompt_digest is not None:
            digest = conversation_digest(messages)
            if digest != exchange.prompt_digest:
                raise ScriptMissError(
                    f"prompt digest {digest} does not match scripted "
                    f"{exchange.prompt_digest}")
        self._next_exchange += 1
        self._pending = list(exchange.reply)
        return self._pending.pop(0)


class RecordingChatBackend:
    """Wraps a live backend and captures every exchange as a replayable script."""

    def __init__(self, inner):
        self._inner = inner
        self._exchanges: list[ScriptedExchange] = []
        self._open_reply: list[ChatMessage] = []
        self._last_digest: str | None = None

    def chat(self, messages, tools=(), params=ChatParams()) -> ChatMessage:
        reply = self._inner.chat(messages, tools, params)
        digest = conversation_digest(messages)
        # A growing prompt that extends the previous conversation belongs to
        # the same exchange's reply sequence (tool-call turns).
        if self._open_reply and self._is_continuation(messages):
            self._open_reply.append(reply)
        else:
            self._flush()
            self._open_reply = [reply]
            self._last_digest = digest
        return reply

    def _is_continuation(self, messages) -> bool:
        return any(m.role == "tool" for m in messages[-2:])

    def _flush(self) -> None:
        if self._open_reply:
            self._exchanges.append(ScriptedExchange(
                reply=tuple(self._open_reply),
                ordinal=len(self._exchanges) + 1,
                prompt_digest=self._last_digest))
            self._open_reply = []

    def dump(self, path: str | Path) -> None:
        self._flush()
        save_script(self._exchanges, path)
