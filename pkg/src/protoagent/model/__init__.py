"""Hierarchical scan-protocol documents: types, XML I/O, validation, tree view."""

from .document import (
    ROOT_ENTITY_TYPE,
    SCALAR_VALUE_TYPES,
    VALUE_TYPES,
    CompositeNode,
    Entity,
    Essential,
    ProtocolDocument,
    TypedValue,
    iter_entities,
    iter_with_depth,
)
from .schema import EntityTypeInfo, SchemaRegistry, asset_path, default_registry, load_registry
from .tree import SimplifiedTree, elide_deepest, render_simplified_tree
from .validation import (
    ERROR,
    WARNING,
    DependencyRule,
    Issue,
    RuleSet,
    ValidationReport,
    ValueRange,
    load_rules,
    parse_rules,
    validate_structure,
    validate_syntax,
)
from .xmlio import parse_protocol, serialize_entity, serialize_protocol

__all__ = [
    "ROOT_ENTITY_TYPE",
    "SCALAR_VALUE_TYPES",
    "VALUE_TYPES",
    "CompositeNode",
    "Entity",
    "Essential",
    "ProtocolDocument",
    "TypedValue",
    "iter_entities",
    "iter_with_depth",
    "EntityTypeInfo",
    "SchemaRegistry",
    "asset_path",
    "default_registry",
    "load_registry",
    "SimplifiedTree",
    "elide_deepest",
    "render_simplified_tree",
    "ERROR",
    "WARNING",
    "DependencyRule",
    "Issue",
    "RuleSet",
    "ValidationReport",
    "ValueRange",
    "load_rules",
    "parse_rules",
    "validate_structure",
    "validate_syntax",
    "parse_protocol",
    "serialize_entity",
    "serialize_protocol",
]
