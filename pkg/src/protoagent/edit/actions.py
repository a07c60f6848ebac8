"""Machine-applicable edit actions and their JSON wire encoding.

The JSON form is shared by planner output, tool-calling replies, eval gold
files and the service API; its schema ships as
``assets/schema/action.schema.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import jsonschema

from ..errors import JsonSchemaError
from ..model import CompositeNode, TypedValue
from ..model.schema import asset_path


@dataclass(frozen=True)
class SetEssential:
    entity_id: str
    essential_name: str
    new_value: TypedValue


@dataclass(frozen=True)
class AddEntity:
    template_entity_id: str
    parent_id: str
    overrides: tuple[tuple[str, TypedValue], ...] = ()
    new_name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "overrides", tuple(tuple(o) for o in self.overrides))


@dataclass(frozen=True)
class DeleteEntity:
    entity_id: str


Action = Union[SetEssential, AddEntity, DeleteEntity]


@dataclass(frozen=True)
class SideEffect:
    kind: str  # "ParentRemoved" | "IdAssigned"
    detail: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


PARENT_REMOVED = "ParentRemoved"
ID_ASSIGNED = "IdAssigned"


# --- TypedValue codec -----------------------------------------------------


def value_to_json(value: TypedValue) -> dict:
    if isinstance(value.payload, CompositeNode):
        return {"type": value.value_type, "payload": _composite_to_json(value.payload)}
    return {"type": value.value_type, "payload": value.payload}


def _composite_to_json(node: CompositeNode) -> dict:
    if node.children:
        return {"tag": node.tag, "children": [_composite_to_json(c) for c in node.children]}
    return {"tag": node.tag, "text": node.text}


def value_from_json(data: dict) -> TypedValue:
    if data["type"] == "Composite":
        return TypedValue("Composite", _composite_from_json(data["payload"]))
    return TypedValue(data["type"], data["payload"])


def _composite_from_json(data: dict) -> CompositeNode:
    if "children" in data:
        return CompositeNode(tag=data["tag"],
                             children=tuple(_composite_from_json(c) for c in data["children"]))
    return CompositeNode(tag=data["tag"], text=data.get("text", ""))


# --- Action codec ---------------------------------------------------------


def action_to_json(action: Action) -> dict:
    if isinstance(action, SetEssential):
        return {"op": "set_essential", "entity_id": action.entity_id,
                "essential_name": action.essential_name,
                "value": value_to_json(action.new_value)}
    if isinstance(action, AddEntity):
        out = {"op": "add_entity", "template_entity_id": action.template_entity_id,
               "parent_id": action.parent_id,
               "overrides": [{"essential": name, "value": value_to_json(value)}
                             for name, value in action.overrides]}
        if action.new_name is not None:
            out["new_name"] = action.new_name
        return out
    if isinstance(action, DeleteEntity):
        return {"op": "delete_entity", "entity_id": action.entity_id}
    raise TypeError(f"not an action: {action!r}")


@lru_cache(maxsize=1)
def action_schema() -> dict:
    return json.loads(asset_path("schema", "action.schema.json").read_text(encoding="utf-8"))


def action_from_json(data: dict) -> Action:
    """Decode one action object, validating against the published schema."""
    try:
        jsonschema.validate(data, action_schema())
    except jsonschema.ValidationError as exc:
        pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise JsonSchemaError(f"invalid action: {exc.message}", pointer=pointer) from exc
    try:
        if data["op"] == "set_essential":
            return SetEssential(entity_id=data["entity_id"],
                                essential_name=data["essential_name"],
                                new_value=value_from_json(data["value"]))
        if data["op"] == "add_entity":
            overrides = tuple((o["essential"], value_from_json(o["value"]))
                              for o in data.get("overrides", []))
            return AddEntity(template_entity_id=data["template_entity_id"],
                             parent_id=data["parent_id"], overrides=overrides,
                             new_name=data.get("new_name"))
        return DeleteEntity(entity_id=data["entity_id"])
    except ValueError as exc:
        raise JsonSchemaError(f"invalid action value: {exc}", pointer="/value") from exc
