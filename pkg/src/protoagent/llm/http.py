"""Generic HTTP chat backend speaking the OpenAI-compatible completions API.

The model is pure configuration (endpoint, name, key via LLM_API_KEY); no
vendor client library is part of the contract.
"""

from __future__ import annotations

import json
import os

import httpx

from ..errors import BackendError, RateLimitedError
from .messages import ChatMessage, ChatParams, ToolCall, ToolSchema

API_KEY_ENV = "LLM_API_KEY"


class HttpChatBackend:
    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 timeout: float = 60.0, max_input_chars: int | None = None):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.timeout = timeout
        self.max_input_chars = max_input_chars

    def chat(self, messages: list[ChatMessage], tools: list[ToolSchema] = (),
             params: ChatParams = ChatParams()) -> ChatMessage:
        body = {
            "model": self.model,
            "messages": [self._wire_message(m) for m in messages],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        if params.seed is not None:
            body["seed"] = params.seed
        if tools:
            body["tools"] = [self._wire_tool(t) for t in tools]
        if self.max_input_chars is not None:
            total = sum(len(m.content) for m in messages)
            if total > self.max_input_chars:
                raise BackendError(
                    f"prompt of {total} chars exceeds the configured input "
                    f"limit of {self.max_input_chars}")
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(f"{self.base_url}/chat/completions", json=body,
                                  headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise BackendError(f"chat request failed: {exc}") from exc
        if response.status_code == 429:
            retry_after = None
            if response.headers.get("Retry-After"):
                try:
                    retry_after = float(response.headers["Retry-After"])
                except ValueError:
                    pass
            raise RateLimitedError("chat endpoint rate limited", retry_after=retry_after)
        if response.status_code != 200:
            raise BackendError(
                f"chat endpoint returned {response.status_code}: {response.text[:200]}")
        return self._parse_reply(response)

    @staticmethod
    def _wire_message(message: ChatMessage) -> dict:
        if message.role == "tool":
            return {"role": "tool",
                    "content": json.dumps(message.tool_result, ensure_ascii=False)}
        wire: dict = {"role": message.role, "content": message.content}
        if message.tool_call is not None:
            wire["tool_calls"] = [{
                "type": "function",
                "function": {"name": message.tool_call.tool_name,
                             "arguments": message.tool_call.arguments_json},
            }]
        return wire

    @staticmethod
    def _wire_tool(tool: ToolSchema) -> dict:
        return {"type": "function",
                "function": {"name": tool.name, "description": tool.description,
                             "parameters": tool.parameters}}

    @staticmethod
    def _parse_reply(response: httpx.Response) -> ChatMessage:
        try:
            message = response.json()["choices"][0]["message"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"malformed chat response: {exc}") from exc
        calls = message.get("tool_calls") or []
        if calls:
            fn = calls[0].get("function", {})
            return ChatMessage(role="assistant", content=message.get("content") or "",
                               tool_call=ToolCall(tool_name=fn.get("name", ""),
                                                  arguments_json=fn.get("arguments", "{}")))
        return ChatMessage(role="assistant", content=message.get("content") or "")
