"""Validating chat gateway.

The gateway sits between the agent and any backend: it enforces the message
preconditions and guarantees that a returned tool call carries arguments
that validate against the declared tool schema, re-asking the model once
before giving up.
"""

from __future__ import annotations

import json

import jsonschema

from ..errors import SchemaViolationError
from .messages import ChatMessage, ChatParams, ToolSchema


class ChatGateway:
    def __init__(self, backend):
        self.backend = backend
        self.calls = 0

    def chat(self, messages: list[ChatMessage], tools: list[ToolSchema] = (),
             params: ChatParams = ChatParams()) -> ChatMessage:
        if not messages:
            raise ValueError("messages must be non-empty")
        if messages[0].role != "system":
            raise ValueError("first message must have the system role")
        names = [t.name for t in tools]
        if len(names) != len(set(names)):
            raise ValueError("tool names must be unique")
        by_name = {t.name: t for t in tools}

        conversation = list(messages)
        for attempt in range(2):
            self.calls += 1
            reply = self.backend.chat(conversation, tools, params)
            if reply.tool_call is None:
                return reply
            problem = self._call_problem(reply, by_name)
            if problem is None:
                return reply
            if attempt == 1:
                raise SchemaViolationError(
                    f"tool call {reply.tool_call.tool_name!r} still invalid "
                    f"after re-ask: {problem}")
            conversation = conversation + [
                reply,
                ChatMessage(role="user",
                            content=f"The tool call was invalid: {problem}. "
                                    "Reply again with corrected arguments."),
            ]
        raise AssertionError("unreachable")

    @staticmethod
    def _call_problem(reply: ChatMessage, by_name: dict[str, ToolSchema]) -> str | None:
        call = reply.tool_call
        schema = by_name.get(call.tool_name)
        if schema is None:
            return f"unknown tool {call.tool_name!r}"
        try:
            arguments = json.loads(call.arguments_json)
        except json.JSONDecodeError as exc:
            return f"arguments are not valid JSON ({exc})"
        try:
            jsonschema.validate(arguments, schema.parameters)
        except jsonschema.ValidationError as exc:
            return exc.message
        return None
