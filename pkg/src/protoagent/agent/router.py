"""Decompose a natural-language request into categorized sub-requests."""

from __future__ import annotations

import json
from functools import lru_cache

import jsonschema

from ..errors import EmptyQueryError, MalformedRouterOutputError
from ..llm import ChatGateway, ChatMessage, ChatParams
from ..model.schema import asset_path
from .requests import RequestCategory, RequestOrigin, SubRequest


@lru_cache(maxsize=1)
def router_prompt() -> str:
    return asset_path("prompts", "router_system.txt").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def _output_schema() -> dict:
    path = asset_path("schema", "router_output.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def extract_json(text: str):
    """Parse a JSON object out of a chat reply, tolerating fenced blocks."""
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        start, end = text.find("{"), text.rfind("}")
        if start == -1 or end <= start:
            raise
        return json.loads(text[start:end + 1])


def _parse_reply(content: str) -> list[SubRequest]:
    data = extract_json(content)
    jsonschema.validate(data, _output_schema())
    return [SubRequest(text=item["text"],
                       category=RequestCategory(item["category"]),
                       rationale=item.get("rationale", ""),
                       origin=RequestOrigin.NATURAL_LANGUAGE)
            for item in data["sub_requests"]]


def route(request_text: str, llm: ChatGateway,
          params: ChatParams | None = None) -> list[SubRequest]:
    """Ask the LLM to split and classify the request.

    Retries once with a corrective message if the reply does not match the
    expected JSON shape, then raises MalformedRouterOutputError.
    """
    if not request_text.strip():
        raise EmptyQueryError("request text must be non-empty")
    params = params or ChatParams()
    messages = [ChatMessage(role="system", content=router_prompt()),
                ChatMessage(role="user", content=request_text)]
    last_error = ""
    for attempt in range(2):
        reply = llm.chat(messages, tools=(), params=params)
        try:
            return _parse_reply(reply.content)
        except (json.JSONDecodeError, jsonschema.ValidationError, ValueError) as exc:
            last_error = str(exc)
            if attempt == 0:
                messages = messages + [reply, ChatMessage(
                    role="user",
                    content=("Your reply was not valid. Answer again with JSON "
                             "only, matching {\"sub_requests\": [{\"text\", "
                             "\"category\", \"rationale\"}]}. "
                             f"Problem: {last_error}"))]
    raise MalformedRouterOutputError(
        f"router reply failed validation after retry: {last_error}")
