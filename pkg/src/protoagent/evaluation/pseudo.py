"""Reconstruct pseudo user requests from retrieved context.

The prompt deliberately never sees the original request: it is built only
from the retrieved entities (rendered as canonical XML, children stripped)
and the memory's type notes. Faithfulness then measures how close those
reconstructions land to the real request.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from functools import lru_cache

import jsonschema

from ..agent import MemoryContext, RetrievedContext
from ..agent.router import extract_json
from ..errors import MalformedOutputError
from ..llm import ChatGateway, ChatMessage, ChatParams
from ..model import ProtocolDocument, serialize_entity
from ..model.schema import asset_path

DEFAULT_TASK_COUNT = 10


@dataclass(frozen=True)
class PseudoTask:
    text: str
    source_case_id: str = ""

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("pseudo task text must be non-empty")


@lru_cache(maxsize=1)
def pseudo_prompt() -> str:
    return asset_path("prompts", "pseudo_tasks_system.txt").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def _tasks_schema() -> dict:
    path = asset_path("schema", "pseudo_tasks.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def render_retrieved_context(retrieved: RetrievedContext,
                             doc: ProtocolDocument) -> str:
    """Canonical XML snippets for each retrieved entity, children stripped."""
    snippets = []
    for ref in retrieved.entities:
        entity = doc.get(ref.entity_id)
        if entity is None:
            continue
        snippets.append(serialize_entity(replace(entity, children=())).rstrip("\n"))
    return "\n".join(snippets)


def build_pseudo_task_request(retrieved: RetrievedContext, doc: ProtocolDocument,
                              memory: MemoryContext | None, n: int) -> str:
    parts = [f"Reconstruct exactly {n} plausible user requests from this "
             "retrieved context.", "", "Retrieved context:",
             render_retrieved_context(retrieved, doc)]
    if memory is not None and memory.entity_descriptions:
        parts += ["", "Entity type notes:"]
        parts += [f"- {t}: {memory.entity_descriptions[t]}"
                  for t in sorted(memory.entity_descriptions)]
    return "\n".join(parts)


def generate_pseudo_tasks(retrieved: RetrievedContext, doc: ProtocolDocument,
                          llm: ChatGateway, n: int, *,
                          memory: MemoryContext | None = None,
                          source_case_id: str = "",
                          params: ChatParams | None = None) -> list[PseudoTask]:
    """Ask the LLM for n reconstructions in a single call.

    One corrective retry when the reply is not n non-empty strings, then
    MalformedOutputError.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not retrieved.entities:
        raise ValueError("retrieved context must not be empty")
    params = params or ChatParams()
    messages = [ChatMessage(role="system", content=pseudo_prompt()),
                ChatMessage(role="user",
                            content=build_pseudo_task_request(retrieved, doc,
                                                              memory, n))]
    last_error = ""
    for attempt in range(2):
        reply = llm.chat(messages, tools=(), params=params)
        try:
            data = extract_json(reply.content)
            jsonschema.validate(data, _tasks_schema())
            if len(data["tasks"]) != n:
                raise ValueError(f"expected {n} tasks, got {len(data['tasks'])}")
            return [PseudoTask(text=text, source_case_id=source_case_id)
                    for text in data["tasks"]]
        except (json.JSONDecodeError, jsonschema.ValidationError, ValueError) as exc:
            last_error = str(exc)
            if attempt == 0:
                messages = messages + [reply, ChatMessage(
                    role="user",
                    content=(f"Your reply was not usable: {last_error}. Reply "
                             f"again with JSON only: {{\"tasks\": [...]}} "
                             f"holding exactly {n} strings."))]
    raise MalformedOutputError(
        f"pseudo-task reply failed validation after retry: {last_error}")
