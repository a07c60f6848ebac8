"""Parsing and canonical serialization of protocol XML.

The canonical form is what every byte-level comparison in this repo is
defined against: UTF-8, two-space indentation, attribute order id/name/type
(``schema-version`` last on the root), essentials before child entities,
self-closing tags for empty elements, and a trailing newline.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape

from ..errors import ProtocolSyntaxError, SchemaError
from .document import (
    ROOT_ENTITY_TYPE,
    CompositeNode,
    Entity,
    Essential,
    ProtocolDocument,
    TypedValue,
)
from .schema import SchemaRegistry, default_registry

_ATTR_ESC = {'"': "&quot;", "\n": "&#10;", "\t": "&#9;"}

DEFAULT_SCHEMA_VERSION = "1.0"


# --- serialization --------------------------------------------------------


def serialize_protocol(doc: ProtocolDocument) -> str:
    """Canonical serialization of a whole document."""
    lines: list[str] = []
    _emit_entity(doc.root, 0, lines, tag=ROOT_ENTITY_TYPE, schema_version=doc.schema_version)
    return "\n".join(lines) + "\n"


def serialize_entity(entity: Entity) -> str:
    """Canonical serialization of one entity subtree (used for XML segments)."""
    lines: list[str] = []
    _emit_entity(entity, 0, lines, tag="Entity")
    return "\n".join(lines) + "\n"


def _emit_entity(entity: Entity, depth: int, lines: list[str], *, tag: str,
                 schema_version: str | None = None) -> None:
    pad = "  " * depth
    attrs = f'id="{_attr(entity.id)}" name="{_attr(entity.name)}" type="{_attr(entity.entity_type)}"'
    if schema_version is not None:
        attrs += f' schema-version="{_attr(schema_version)}"'
    if not entity.essentials and not entity.children:
        lines.append(f"{pad}<{tag} {attrs}/>")
        return
    lines.append(f"{pad}<{tag} {attrs}>")
    for essential in entity.essentials:
        _emit_essential(essential, depth + 1, lines)
    for child in entity.children:
        _emit_entity(child, depth + 1, lines, tag="Entity")
    lines.append(f"{pad}</{tag}>")


def _emit_essential(essential: Essential, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    lines.append(f"{pad}<Essential>")
    lines.append(f"{pad}  <Name>{escape(essential.name)}</Name>")
    value = essential.value
    if isinstance(value.payload, CompositeNode):
        lines.append(f'{pad}  <Value type="{_attr(value.value_type)}">')
        _emit_composite(value.payload, depth + 2, lines)
        lines.append(f"{pad}  </Value>")
    else:
        lines.append(
            f'{pad}  <Value type="{_attr(value.value_type)}">{escape(value.payload)}</Value>'
        )
    lines.append(f"{pad}</Essential>")


def _emit_composite(node: CompositeNode, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    if node.children:
        lines.append(f"{pad}<{node.tag}>")
        for child in node.children:
            _emit_composite(child, depth + 1, lines)
        lines.append(f"{pad}</{node.tag}>")
    elif node.text:
        lines.append(f"{pad}<{node.tag}>{escape(node.text)}</{node.tag}>")
    else:
        lines.append(f"{pad}<{node.tag}/>")


def _attr(value: str) -> str:
    return escape(value, _ATTR_ESC)


# --- parsing --------------------------------------------------------------


def parse_protocol(xml_text: str, *, strict: bool = False,
                   registry: SchemaRegistry | None = None,
                   source_name: str | None = None) -> ProtocolDocument:
    """Parse protocol XML into an immutable document.

    Raises ProtocolSyntaxError for malformed XML and SchemaError for
    well-formed XML that violates the protocol schema.  With ``strict`` the
    entity types must come from the registered type set.
    """
    if registry is None:
        registry = default_registry()
    try:
        elem = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        line, column = exc.position if exc.position else (None, None)
        raise ProtocolSyntaxError(str(exc), line=line, column=column) from exc

    if elem.tag != ROOT_ENTITY_TYPE:
        raise SchemaError(
            f"root element must be <{ROOT_ENTITY_TYPE}>, got <{elem.tag}>",
            code="UNKNOWN_ELEMENT", path="",
        )
    schema_version = elem.attrib.get("schema-version", DEFAULT_SCHEMA_VERSION)
    seen_ids: set[str] = set()
    root = _parse_entity(elem, path="", strict=strict, registry=registry,
                         seen_ids=seen_ids, is_root=True)
    if root.entity_type != ROOT_ENTITY_TYPE:
        raise SchemaError(
            f"root entity type must be {ROOT_ENTITY_TYPE!r}, got {root.entity_type!r}",
            code="BAD_ROOT_TYPE", path=root.id,
        )
    return ProtocolDocument(schema_version=schema_version, root=root, source_name=source_name)


_ENTITY_ATTRS = {"id", "name", "type"}
_ROOT_ATTRS = _ENTITY_ATTRS | {"schema-version"}


def _parse_entity(elem: ET.Element, *, path: str, strict: bool,
                  registry: SchemaRegistry, seen_ids: set[str], is_root: bool) -> Entity:
    allowed = _ROOT_ATTRS if is_root else _ENTITY_ATTRS
    for attr in elem.attrib:
        if attr not in allowed:
            raise SchemaError(f"unknown attribute {attr!r} on <{elem.tag}>",
                              code="UNKNOWN_ATTRIBUTE", path=path)
    for required in ("id", "name", "type"):
        if not elem.attrib.get(required):
            raise SchemaError(f"<{elem.tag}> is missing attribute {required!r}",
                              code="MISSING_ATTRIBUTE", path=path)
    entity_id = elem.attrib["id"]
    entity_path = f"{path}/{entity_id}" if path else entity_id
    if entity_id in seen_ids:
        raise SchemaError(f"duplicate entity id {entity_id!r}",
                          code="DUPLICATE_ID", path=entity_path)
    seen_ids.add(entity_id)
    entity_type = elem.attrib["type"]
    if strict and not registry.is_registered(entity_type):
        raise SchemaError(f"unregistered entity type {entity_type!r}",
                          code="UNKNOWN_TYPE", path=entity_path)
    if elem.text and elem.text.strip():
        raise SchemaError("entity elements must not contain text",
                          code="UNEXPECTED_TEXT", path=entity_path)

    essentials: list[Essential] = []
    children: list[Entity] = []
    names: set[str] = set()
    for child in elem:
        if child.tail and child.tail.strip():
            raise SchemaError("stray text inside entity element",
                              code="UNEXPECTED_TEXT", path=entity_path)
        if child.tag == "Essential":
            essential = _parse_essential(child, path=entity_path)
            if essential.name in names:
                raise SchemaError(f"duplicate essential {essential.name!r}",
                                  code="DUPLICATE_ESSENTIAL", path=entity_path)
            names.add(essential.name)
            essentials.append(essential)
        elif child.tag == "Entity":
            children.append(_parse_entity(child, path=entity_path, strict=strict,
                                          registry=registry, seen_ids=seen_ids,
                                          is_root=False))
        else:
            raise SchemaError(f"unknown element <{child.tag}> inside entity",
                              code="UNKNOWN_ELEMENT", path=entity_path)
    return Entity(id=entity_id, name=elem.attrib["name"], entity_type=entity_type,
                  essentials=tuple(essentials), children=tuple(children))


def _parse_essential(elem: ET.Element, *, path: str) -> Essential:
    if elem.attrib:
        raise SchemaError("<Essential> takes no attributes",
                          code="UNKNOWN_ATTRIBUTE", path=path)
    name_elem = None
    value_elem = None
    for child in elem:
        if child.tag == "Name" and name_elem is None:
            name_elem = child
        elif child.tag == "Value" and value_elem is None:
            value_elem = child
        else:
            raise SchemaError(f"unexpected <{child.tag}> inside <Essential>",
                              code="UNKNOWN_ELEMENT", path=path)
    if name_elem is None or value_elem is None:
        raise SchemaError("<Essential> requires <Name> and <Value>",
                          code="MISSING_ELEMENT", path=path)
    if len(name_elem) or name_elem.attrib:
        raise SchemaError("<Name> must be a plain text element",
                          code="UNKNOWN_ELEMENT", path=path)
    name = (name_elem.text or "").strip()
    if not name:
        raise SchemaError("essential name must be non-empty",
                          code="MISSING_ELEMENT", path=path)

    value_type = value_elem.attrib.get("type")
    if value_type is None:
        raise SchemaError("<Value> is missing its type attribute",
                          code="MISSING_ATTRIBUTE", path=path)
    for attr in value_elem.attrib:
        if attr != "type":
            raise SchemaError(f"unknown attribute {attr!r} on <Value>",
                              code="UNKNOWN_ATTRIBUTE", path=path)
    try:
        if value_type == "Composite":
            children = [_parse_composite(c, path=path) for c in value_elem]
            if len(children) != 1:
                raise SchemaError("composite <Value> requires exactly one child element",
                                  code="BAD_VALUE", path=path)
            value = TypedValue("Composite", children[0])
        else:
            if len(value_elem):
                raise SchemaError(f"{value_type} <Value> must not have child elements",
                                  code="BAD_VALUE", path=path)
            value = TypedValue(value_type, (value_elem.text or "").strip())
    except ValueError as exc:
        raise SchemaError(str(exc), code="BAD_VALUE", path=path) from exc
    return Essential(name=name, value=value)


def _parse_composite(elem: ET.Element, *, path: str) -> CompositeNode:
    if elem.attrib:
        raise SchemaError("composite elements take no attributes",
                          code="UNKNOWN_ATTRIBUTE", path=path)
    children = [_parse_composite(c, path=path) for c in elem]
    text = (elem.text or "").strip()
    if children and text:
        raise SchemaError("composite element mixes text and children",
                          code="BAD_VALUE", path=path)
    try:
        if children:
            return CompositeNode(tag=elem.tag, children=tuple(children))
        return CompositeNode(tag=elem.tag, text=text)
    except ValueError as exc:
        raise SchemaError(str(exc), code="BAD_VALUE", path=path) from exc
