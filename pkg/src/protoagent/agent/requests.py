"""Request categories, sub-requests and the structured JSON input path.

Structured requests arrive pre-decomposed, so they skip the router entirely
and map straight onto a single categorized sub-request.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from functools import lru_cache

import jsonschema

from ..edit.actions import value_from_json
from ..errors import JsonSchemaError
from ..model import TypedValue
from ..model.schema import asset_path


class RequestCategory(str, enum.Enum):
    ADDING = "Adding"
    MODIFICATION = "Modification"
    DELETING = "Deleting"
    OTHERS = "Others"


class RequestOrigin(str, enum.Enum):
    NATURAL_LANGUAGE = "NaturalLanguage"
    STRUCTURED_JSON = "StructuredJson"


_OPERATION_CATEGORY = {
    "modify": RequestCategory.MODIFICATION,
    "add": RequestCategory.ADDING,
    "delete": RequestCategory.DELETING,
}


@dataclass(frozen=True)
class Selector:
    """Picks entities by type and/or name substring (both optional)."""

    entity_type: str | None = None
    name_contains: str | None = None

    def phrase(self) -> str:
        if self.entity_type and self.name_contains:
            return (f'the {self.entity_type} entity whose name contains '
                    f'"{self.name_contains}"')
        if self.entity_type:
            return f"the {self.entity_type} entity"
        if self.name_contains:
            return f'the entity whose name contains "{self.name_contains}"'
        return "the protocol"


@dataclass(frozen=True)
class StructuredRequest:
    operation: str
    target: Selector | None = None
    changes: tuple[tuple[str, TypedValue], ...] = ()
    template: Selector | None = None
    parent: Selector | None = None


@dataclass(frozen=True)
class SubRequest:
    text: str
    category: RequestCategory
    rationale: str = ""
    origin: RequestOrigin = RequestOrigin.NATURAL_LANGUAGE
    structured: StructuredRequest | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("sub-request text must be non-empty")

    @property
    def dispatchable(self) -> bool:
        """Only the three edit categories ever reach the planner."""
        return self.category is not RequestCategory.OTHERS


@lru_cache(maxsize=1)
def _request_schema() -> dict:
    path = asset_path("schema", "structured_request.schema.json")
    return json.loads(path.read_text(encoding="utf-8"))


def _value_text(value: TypedValue) -> str:
    try:
        return value.scalar_text()
    except ValueError:
        return "a composite value"


def _selector_from_json(data: dict | None) -> Selector | None:
    if data is None:
        return None
    return Selector(entity_type=data.get("entity_type"),
                    name_contains=data.get("name_contains"))


def _canonical_text(req: StructuredRequest) -> str:
    if req.operation == "delete":
        return f"Delete {req.target.phrase()}."
    if req.operation == "add":
        text = (f"Add a copy of {req.template.phrase()} under "
                f"{req.parent.phrase()}")
        if req.changes:
            parts = ", ".join(f"{name} set to {_value_text(value)}"
                              for name, value in req.changes)
            text += f", with {parts}"
        return text + "."
    parts = " and ".join(f"{name} to {_value_text(value)}"
                         for name, value in req.changes)
    where = f" on {req.target.phrase()}" if req.target else ""
    return f"Set {parts}{where}."


def parse_structured_request(json_text: str) -> list[SubRequest]:
    """Turn one structured request into its sub-request, without any LLM call.

    Raises JsonSchemaError carrying a JSON-pointer to the offending field.
    """
    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise JsonSchemaError(f"request is not valid JSON: {exc}", pointer="") from exc
    try:
        jsonschema.validate(data, _request_schema())
    except jsonschema.ValidationError as exc:
        pointer = "/" + "/".join(str(p) for p in exc.absolute_path)
        raise JsonSchemaError(f"invalid structured request: {exc.message}",
                              pointer=pointer) from exc

    operation = data["operation"]
    # Operation-specific requirements are checked here rather than with a
    # schema oneOf so the error pointer names the missing field directly.
    if operation == "modify" and not data.get("changes"):
        raise JsonSchemaError("a modify request needs at least one change",
                              pointer="/changes")
    if operation == "add":
        for name in ("template", "parent"):
            if name not in data:
                raise JsonSchemaError(f"an add request needs a {name} selector",
                                      pointer=f"/{name}")
    if operation == "delete" and "target" not in data:
        raise JsonSchemaError("a delete request needs a target selector",
                              pointer="/target")

    changes = []
    for i, entry in enumerate(data.get("changes", [])):
        try:
            changes.append((entry["essential"], value_from_json(entry["value"])))
        except ValueError as exc:
            raise JsonSchemaError(f"invalid change value: {exc}",
                                  pointer=f"/changes/{i}/value") from exc

    req = StructuredRequest(operation=operation,
                            target=_selector_from_json(data.get("target")),
                            changes=tuple(changes),
                            template=_selector_from_json(data.get("template")),
                            parent=_selector_from_json(data.get("parent")))
    sub = SubRequest(text=_canonical_text(req),
                     category=_OPERATION_CATEGORY[operation],
                     rationale=f"structured {operation} request",
                     origin=RequestOrigin.STRUCTURED_JSON,
                     structured=req)
    return [sub]
