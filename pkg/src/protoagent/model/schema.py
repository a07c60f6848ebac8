"""Registry of known entity types and their essential vocabularies.

The registry is data, not code: it ships as ``assets/schema/protocol_schema.json``
and drives strict validation, essential creation and memory descriptions.
The vocabulary is an extrapolation from published examples and is documented
as such in the asset file itself.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from ..errors import RuleSetError


@dataclass(frozen=True)
class EntityTypeInfo:
    name: str
    description: str
    essentials: dict[str, str]  # essential name -> value type tag


@dataclass(frozen=True)
class SchemaRegistry:
    schema_version: str
    types: dict[str, EntityTypeInfo]

    def is_registered(self, entity_type: str) -> bool:
        return entity_type in self.types

    def essential_type(self, entity_type: str, essential_name: str) -> str | None:
        info = self.types.get(entity_type)
        if info is None:
            return None
        return info.essentials.get(essential_name)

    def registered_types(self) -> set[str]:
        return set(self.types)


def asset_path(*parts: str):
    """Path-like handle to a file under the package's assets directory."""
    node = resources.files("protoagent").joinpath("assets")
    for part in parts:
        node = node.joinpath(part)
    return node


def load_registry(path=None) -> SchemaRegistry:
    if path is None:
        return default_registry()
    with open(path, encoding="utf-8") as fh:
        return _parse_registry(json.load(fh))


@lru_cache(maxsize=1)
def default_registry() -> SchemaRegistry:
    raw = asset_path("schema", "protocol_schema.json").read_text(encoding="utf-8")
    return _parse_registry(json.loads(raw))


def _parse_registry(data: dict) -> SchemaRegistry:
    try:
        types = {
            name: EntityTypeInfo(
                name=name,
                description=info.get("description", ""),
                essentials=dict(info.get("essentials", {})),
            )
            for name, info in data["entity_types"].items()
        }
        return SchemaRegistry(schema_version=data["schema_version"], types=types)
    except (KeyError, TypeError, AttributeError) as exc:
        raise RuleSetError(f"invalid schema registry: {exc}") from exc
