"""Proposal synthesis.

Natural-language sub-requests run a tool-calling loop against the LLM;
structured sub-requests are resolved deterministically without any chat
call. Both paths end in a Proposal whose actions reference only ids that
exist in the document.
"""

from __future__ import annotations

import json
from functools import lru_cache

import jsonschema

from ..edit import (AddEntity, DeleteEntity, EntityQuery, EntityRef,
                    SetEssential, action_from_json, get_essentials,
                    retrieve_entities, value_to_json)
from ..errors import (JsonSchemaError, MalformedPlanError, ProtoAgentError)
from ..llm import ChatGateway, ChatMessage, ChatParams, ToolSchema
from ..model import ProtocolDocument, RuleSet, load_rules, validate_structure
from ..model.schema import asset_path
from .memory import MemoryContext
from .proposals import Proposal, ProposalStatus, RetrievedContext
from .requests import RequestCategory, Selector, SubRequest
from .router import extract_json

MAX_PLANNER_TURNS = 8

_OP_NAMES = {SetEssential: "set_essential", AddEntity: "add_entity",
             DeleteEntity: "delete_entity"}
_ALLOWED_KIND = {RequestCategory.MODIFICATION: SetEssential,
                 RequestCategory.ADDING: AddEntity,
                 RequestCategory.DELETING: DeleteEntity}


@lru_cache(maxsize=1)
def planner_prompt() -> str:
    return asset_path("prompts", "planner_system.txt").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def _plan_schema() -> dict:
    path = asset_path("schema", "plan_output.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def planner_tools() -> list[ToolSchema]:
    return [
        ToolSchema(
            name="retrieve_entities",
            description=("Find entities by type, name substring and/or free-text "
                         "keyword. Returns id, name and type per match."),
            parameters={"type": "object",
                        "properties": {"entity_type": {"type": "string"},
                                       "name_contains": {"type": "string"},
                                       "keyword": {"type": "string"}},
                        "additionalProperties": False},
            result_schema={"type": "object"}),
        ToolSchema(
            name="get_essentials",
            description="List an entity's essentials with types and current values.",
            parameters={"type": "object",
                        "properties": {"entity_id": {"type": "string"},
                                       "names": {"type": "array",
                                                 "items": {"type": "string"}}},
                        "required": ["entity_id"],
                        "additionalProperties": False},
            result_schema={"type": "object"}),
        ToolSchema(
            name="validate_structure",
            description="Run the structural rule checks on the current protocol.",
            parameters={"type": "object", "properties": {},
                        "additionalProperties": False},
            result_schema={"type": "object"}),
    ]


class _ToolRunner:
    """Executes planner tool calls and accumulates the retrieved context."""

    def __init__(self, doc: ProtocolDocument, rules: RuleSet):
        self.doc = doc
        self.rules = rules
        self.entities: list[EntityRef] = []
        self.essentials: list[tuple[str, str]] = []
        self.widest_hit = 0

    def _note_entity(self, ref: EntityRef) -> None:
        if ref not in self.entities:
            self.entities.append(ref)

    def run(self, name: str, arguments: dict) -> dict:
        try:
            if name == "retrieve_entities":
                query = EntityQuery(type_filter=arguments.get("entity_type"),
                                    name_contains=arguments.get("name_contains"),
                                    keyword=arguments.get("keyword"))
                refs = retrieve_entities(self.doc, query)
                self.widest_hit = max(self.widest_hit, len(refs))
                for ref in refs:
                    self._note_entity(ref)
                return {"ok": True, "entities": [ref.to_json() for ref in refs]}
            if name == "get_essentials":
                entity_id = arguments["entity_id"]
                found = get_essentials(self.doc, entity_id, arguments.get("names"))
                self._note_entity(EntityRef.of(self.doc.get(entity_id)))
                for essential in found:
                    pair = (entity_id, essential.name)
                    if pair not in self.essentials:
                        self.essentials.append(pair)
                return {"ok": True, "entity_id": entity_id,
                        "essentials": [{"name": e.name,
                                        "value": value_to_json(e.value)}
                                       for e in found]}
            if name == "validate_structure":
                return {"ok": True, "report": validate_structure(self.doc, self.rules).to_json()}
        except ProtoAgentError as exc:
            return {"ok": False, "error": str(exc)}
        return {"ok": False, "error": f"unknown tool {name!r}"}

    def context(self) -> RetrievedContext:
        return RetrievedContext(entities=tuple(self.entities),
                                essentials=tuple(self.essentials))


def _value_text(value) -> str:
    try:
        return value.scalar_text()
    except ValueError:
        return "a composite value"


def _plan_line(doc: ProtocolDocument, action) -> str:
    if isinstance(action, SetEssential):
        entity = doc.get(action.entity_id)
        return (f"Set {action.essential_name} to {_value_text(action.new_value)} "
                f"on {entity.name} ({entity.id}).")
    if isinstance(action, AddEntity):
        template = doc.get(action.template_entity_id)
        parent = doc.get(action.parent_id)
        line = (f"Add a copy of {template.name} ({template.id}) under "
                f"{parent.name} ({parent.id})")
        if action.overrides:
            tweaks = ", ".join(f"{name}={_value_text(value)}"
                               for name, value in action.overrides)
            line += f" with {tweaks}"
        return line + "."
    entity = doc.get(action.entity_id)
    return (f"Delete {entity.name} ({entity.id}); a compound parent left "
            f"without children is removed as well.")


def _failed(proposal_id: str, sub: SubRequest, message: str,
            retrieved: RetrievedContext = RetrievedContext()) -> Proposal:
    return Proposal(id=proposal_id, subrequest=sub, retrieved=retrieved,
                    status=ProposalStatus.FAILED, error=message)


def _purity_problem(actions, category: RequestCategory) -> str | None:
    allowed = _ALLOWED_KIND[category]
    for action in actions:
        if not isinstance(action, allowed):
            return (f"a {category.value} sub-request may only contain "
                    f"{_OP_NAMES[allowed]} actions, got {_OP_NAMES[type(action)]}")
    return None


def _unresolved_ids(doc: ProtocolDocument, actions) -> list[str]:
    missing = []
    for action in actions:
        if isinstance(action, AddEntity):
            wanted = (action.template_entity_id, action.parent_id)
        else:
            wanted = (action.entity_id,)
        for entity_id in wanted:
            if doc.get(entity_id) is None and entity_id not in missing:
                missing.append(entity_id)
    return missing


# --- structured path -------------------------------------------------------


def _resolve_selector(doc: ProtocolDocument, selector: Selector | None,
                      role: str):
    """-> (ref, ambiguous, error_message)."""
    if selector is None or (selector.entity_type is None
                            and selector.name_contains is None):
        return None, False, f"the request has no usable {role} selector"
    refs = retrieve_entities(doc, EntityQuery(type_filter=selector.entity_type,
                                              name_contains=selector.name_contains))
    if not refs:
        return None, False, f"nothing matches {selector.phrase()} ({role})"
    return refs[0], len(refs) > 1, None


def _plan_structured(sub: SubRequest, doc: ProtocolDocument,
                     proposal_id: str) -> Proposal:
    req = sub.structured
    entities: list[EntityRef] = []
    essentials: list[tuple[str, str]] = []
    ambiguous = False

    if req.operation == "modify":
        target, ambiguous, error = _resolve_selector(doc, req.target, "target")
        if error:
            return _failed(proposal_id, sub, error)
        entities.append(target)
        actions = tuple(SetEssential(target.entity_id, name, value)
                        for name, value in req.changes)
        entity = doc.get(target.entity_id)
        essentials = [(target.entity_id, name) for name, _ in req.changes
                      if entity.essential(name) is not None]
    elif req.operation == "add":
        template, amb_t, error = _resolve_selector(doc, req.template, "template")
        if error:
            return _failed(proposal_id, sub, error)
        parent, amb_p, error = _resolve_selector(doc, req.parent, "parent")
        if error:
            return _failed(proposal_id, sub, error)
        ambiguous = amb_t or amb_p
        entities += [template, parent]
        actions = (AddEntity(template_entity_id=template.entity_id,
                             parent_id=parent.entity_id,
                             overrides=req.changes),)
    else:
        target, ambiguous, error = _resolve_selector(doc, req.target, "target")
        if error:
            return _failed(proposal_id, sub, error)
        entities.append(target)
        actions = (DeleteEntity(target.entity_id),)

    plan_text = "\n".join(_plan_line(doc, action) for action in actions)
    return Proposal(id=proposal_id, subrequest=sub,
                    retrieved=RetrievedContext(entities=tuple(entities),
                                               essentials=tuple(essentials)),
                    actions=actions, plan_text=plan_text,
                    low_confidence=ambiguous)


# --- LLM path --------------------------------------------------------------


class _BadFinal(Exception):
    pass


def _parse_final(content: str, category: RequestCategory):
    try:
        data = extract_json(content)
        jsonschema.validate(data, _plan_schema())
        actions = tuple(action_from_json(a) for a in data["actions"])
    except (json.JSONDecodeError, jsonschema.ValidationError,
            JsonSchemaError, ValueError) as exc:
        raise _BadFinal(str(exc)) from exc
    problem = _purity_problem(actions, category)
    if problem:
        raise _BadFinal(problem)
    return actions, data["plan"]


def _plan_with_llm(sub: SubRequest, doc: ProtocolDocument, memory: MemoryContext,
                   llm: ChatGateway, rules: RuleSet, proposal_id: str,
                   params: ChatParams, max_turns: int) -> Proposal:
    runner = _ToolRunner(doc, rules)
    messages = [
        ChatMessage(role="system",
                    content=planner_prompt() + "\n\n" + memory.as_prompt_block()),
        ChatMessage(role="user",
                    content=f"Category: {sub.category.value}\n"
                            f"Sub-request: {sub.text}"),
    ]
    tools = planner_tools()
    retried = False
    last_error = ""
    for _ in range(max_turns):
        reply = llm.chat(messages, tools=tools, params=params)
        if reply.tool_call is not None:
            result = runner.run(reply.tool_call.tool_name,
                                reply.tool_call.arguments())
            messages = messages + [reply, ChatMessage(role="tool", content="",
                                                      tool_result=result)]
            continue
        try:
            actions, plan_text = _parse_final(reply.content, sub.category)
        except _BadFinal as exc:
            last_error = str(exc)
            if retried:
                raise MalformedPlanError(
                    f"planner reply failed validation after retry: {last_error}")
            retried = True
            messages = messages + [reply, ChatMessage(
                role="user",
                content=("Your final answer was not usable: "
                         f"{last_error}. Reply again with JSON only, "
                         "matching {\"actions\": [...], \"plan\": \"...\"}."))]
            continue
        missing = _unresolved_ids(doc, actions)
        if missing:
            return _failed(
                proposal_id, sub,
                f"plan references unresolved entity ids: {', '.join(missing)}",
                retrieved=runner.context())
        return Proposal(id=proposal_id, subrequest=sub,
                        retrieved=runner.context(), actions=actions,
                        plan_text=plan_text,
                        low_confidence=runner.widest_hit > 1 and len(actions) == 1)
    raise MalformedPlanError(
        f"planner did not conclude within {max_turns} turns")


def plan(sub: SubRequest, doc: ProtocolDocument, memory: MemoryContext,
         llm: ChatGateway | None, *, rules: RuleSet | None = None,
         proposal_id: str = "prop-1", params: ChatParams | None = None,
         max_turns: int = MAX_PLANNER_TURNS) -> Proposal:
    """Produce a reviewable proposal for one dispatchable sub-request.

    Structured sub-requests never touch the LLM; uncertain selector matches
    are marked low-confidence instead of guessing silently.
    """
    if not sub.dispatchable:
        raise ValueError("Others sub-requests are not plannable")
    rules = rules if rules is not None else load_rules()
    if sub.structured is not None:
        return _plan_structured(sub, doc, proposal_id)
    if llm is None:
        raise ValueError("natural-language planning needs a chat backend")
    return _plan_with_llm(sub, doc, memory, llm, rules, proposal_id,
                          params or ChatParams(), max_turns)
