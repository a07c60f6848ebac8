"""Immutable value types for the hierarchical scan-protocol document.

A protocol is a tree of entities; each entity carries an ordered list of
named, typed parameters ("essentials").  Documents never mutate: every edit
builds a new tree, so they are safe to share across threads and to keep as
before/after snapshots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator

SCALAR_VALUE_TYPES = ("Decimal", "Integer", "Boolean", "String", "EnumToken")
VALUE_TYPES = SCALAR_VALUE_TYPES + ("Composite",)

ROOT_ENTITY_TYPE = "ScanProtocol"

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INTEGER_RE = re.compile(r"^[+-]?\d+$")
_ENUM_RE = re.compile(r"^[A-Za-z0-9_]+$")


@dataclass(frozen=True)
class CompositeNode:
    """One node of a composite value: either a text leaf or a container."""

    tag: str
    text: str = ""
    children: tuple["CompositeNode", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.tag or not _ENUM_RE.match(self.tag):
            raise ValueError(f"invalid composite tag {self.tag!r}")
        if self.children and self.text:
            raise ValueError("composite node cannot carry both text and children")
        if self.text != self.text.strip():
            raise ValueError("composite text must not have surrounding whitespace")


@dataclass(frozen=True)
class TypedValue:
    """A tagged value; scalar payloads are kept as their exact source text."""

    value_type: str
    payload: str | CompositeNode

    def __post_init__(self):
        if self.value_type not in VALUE_TYPES:
            raise ValueError(f"unknown value type {self.value_type!r}")
        if self.value_type == "Composite":
            if not isinstance(self.payload, CompositeNode):
                raise ValueError("Composite value requires a CompositeNode payload")
            return
        if not isinstance(self.payload, str):
            raise ValueError(f"{self.value_type} value requires a text payload")
        text = self.payload
        if text != text.strip():
            raise ValueError("scalar payload must not have surrounding whitespace")
        if self.value_type == "Decimal" and not _DECIMAL_RE.match(text):
            raise ValueError(f"not a decimal payload: {text!r}")
        if self.value_type == "Integer" and not _INTEGER_RE.match(text):
            raise ValueError(f"not an integer payload: {text!r}")
        if self.value_type == "Boolean" and text not in ("true", "false"):
            raise ValueError(f"not a boolean payload: {text!r}")
        if self.value_type == "EnumToken" and not _ENUM_RE.match(text):
            raise ValueError(f"not an enum token: {text!r}")

    @classmethod
    def decimal(cls, text: str | float) -> "TypedValue":
        return cls("Decimal", str(text))

    @classmethod
    def integer(cls, text: str | int) -> "TypedValue":
        return cls("Integer", str(text))

    @classmethod
    def boolean(cls, value: bool) -> "TypedValue":
        return cls("Boolean", "true" if value else "false")

    @classmethod
    def string(cls, text: str) -> "TypedValue":
        return cls("String", text)

    @classmethod
    def enum(cls, token: str) -> "TypedValue":
        return cls("EnumToken", token)

    @classmethod
    def composite(cls, node: CompositeNode) -> "TypedValue":
        return cls("Composite", node)

    def scalar_text(self) -> str:
        """The payload text for scalar values; raises for composites."""
        if not isinstance(self.payload, str):
            raise ValueError("composite value has no scalar text")
        return self.payload


@dataclass(frozen=True)
class Essential:
    name: str
    value: TypedValue

    def __post_init__(self):
        if not self.name:
            raise ValueError("essential name must be non-empty")


@dataclass(frozen=True)
class Entity:
    """One node of the protocol tree."""

    id: str
    name: str
    entity_type: str
    essentials: tuple[Essential, ...] = ()
    children: tuple["Entity", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "essentials", tuple(self.essentials))
        object.__setattr__(self, "children", tuple(self.children))
        if not self.id or not self.name or not self.entity_type:
            raise ValueError("entity id, name and type must be non-empty")
        names = [e.name for e in self.essentials]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate essential name in entity {self.id!r}")

    def essential(self, name: str) -> Essential | None:
        for ess in self.essentials:
            if ess.name == name:
                return ess
        return None


@dataclass(frozen=True)
class ProtocolDocument:
    schema_version: str
    root: Entity
    source_name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.root.entity_type != ROOT_ENTITY_TYPE:
            raise ValueError(f"root entity type must be {ROOT_ENTITY_TYPE!r}")
        ids = [e.id for e in iter_entities(self.root)]
        if len(ids) != len(set(ids)):
            seen, dup = set(), None
            for i in ids:
                if i in seen:
                    dup = i
                    break
                seen.add(i)
            raise ValueError(f"duplicate entity id {dup!r}")

    def get(self, entity_id: str) -> Entity | None:
        for entity in iter_entities(self.root):
            if entity.id == entity_id:
                return entity
        return None

    def entity_ids(self) -> set[str]:
        return {e.id for e in iter_entities(self.root)}

    def entity_count(self) -> int:
        return sum(1 for _ in iter_entities(self.root))

    def parent_of(self, entity_id: str) -> Entity | None:
        """Parent entity, or None for the root / unknown ids."""
        for entity in iter_entities(self.root):
            for child in entity.children:
                if child.id == entity_id:
                    return entity
        return None

    def path_to(self, entity_id: str) -> tuple[Entity, ...] | None:
        """Entities from the root down to the given id, inclusive."""

        def walk(entity: Entity, trail: tuple[Entity, ...]):
            trail = trail + (entity,)
            if entity.id == entity_id:
                return trail
            for child in entity.children:
                found = walk(child, trail)
                if found:
                    return found
            return None

        return walk(self.root, ())

    def replace_root(self, root: Entity) -> "ProtocolDocument":
        return ProtocolDocument(self.schema_version, root, self.source_name)


def iter_entities(entity: Entity) -> Iterator[Entity]:
    """Preorder traversal of a subtree."""
    yield entity
    for child in entity.children:
        yield from iter_entities(child)


def iter_with_depth(entity: Entity, depth: int = 0) -> Iterator[tuple[Entity, int]]:
    yield entity, depth
    for child in entity.children:
        yield from iter_with_depth(child, depth + 1)
