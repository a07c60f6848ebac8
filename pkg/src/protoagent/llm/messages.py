"""Chat message and tool-schema types shared by all backends."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any

ROLES = ("system", "user", "assistant", "tool")


@dataclass(frozen=True)
class ToolCall:
    tool_name: str
    arguments_json: str

    def arguments(self) -> Any:
        return json.loads(self.arguments_json)


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str = ""
    tool_call: ToolCall | None = None
    tool_result: Any = None

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.role == "tool" and self.tool_result is None:
            raise ValueError("tool messages must carry a tool_result")
        if self.tool_call is not None and self.role != "assistant":
            raise ValueError("only assistant messages may carry a tool_call")

    def to_json(self) -> dict:
        out: dict[str, Any] = {"role": self.role, "content": self.content}
        if self.tool_call is not None:
            out["tool_call"] = {"tool_name": self.tool_call.tool_name,
                                "arguments_json": self.tool_call.arguments_json}
        if self.tool_result is not None:
            out["tool_result"] = self.tool_result
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ChatMessage":
        call = None
        if data.get("tool_call"):
            call = ToolCall(tool_name=data["tool_call"]["tool_name"],
                            arguments_json=data["tool_call"]["arguments_json"])
        return cls(role=data["role"], content=data.get("content", ""),
                   tool_call=call, tool_result=data.get("tool_result"))


@dataclass(frozen=True)
class ToolSchema:
    name: str
    description: str
    parameters: dict = field(default_factory=dict, compare=False)
    result_schema: dict | None = field(default=None, compare=False)


@dataclass(frozen=True)
class ChatParams:
    temperature: float = 0.0
    max_tokens: int = 1024
    seed: int | None = 0


def conversation_digest(messages: list[ChatMessage] | tuple[ChatMessage, ...]) -> str:
    """Stable sha256 digest of a prompt, used for script matching and history."""
    payload = json.dumps([m.to_json() for m in messages], sort_keys=True,
                         ensure_ascii=False)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
