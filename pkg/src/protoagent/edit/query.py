"""Entity retrieval over a protocol document."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import EmptyQueryError, UnknownEntityError
from ..model import Entity, Essential, ProtocolDocument, iter_entities


@dataclass(frozen=True)
class EntityRef:
    entity_id: str
    name: str
    entity_type: str

    @classmethod
    def of(cls, entity: Entity) -> "EntityRef":
        return cls(entity_id=entity.id, name=entity.name, entity_type=entity.entity_type)

    def to_json(self) -> dict:
        return {"entity_id": self.entity_id, "name": self.name,
                "entity_type": self.entity_type}


@dataclass(frozen=True)
class EntityQuery:
    type_filter: str | None = None
    name_contains: str | None = None
    keyword: str | None = None
    max_results: int = 20

    def __post_init__(self):
        if self.max_results < 1:
            raise ValueError("max_results must be positive")

    def has_filter(self) -> bool:
        return any((self.type_filter, self.name_contains, self.keyword))


def retrieve_entities(doc: ProtocolDocument, query: EntityQuery) -> list[EntityRef]:
    """Matching entities in preorder document order, capped at max_results."""
    if not query.has_filter():
        raise EmptyQueryError("query must set at least one filter")
    matches: list[EntityRef] = []
    for entity in iter_entities(doc.root):
        if _matches(entity, query):
            matches.append(EntityRef.of(entity))
            if len(matches) >= query.max_results:
                break
    return matches


def _matches(entity: Entity, query: EntityQuery) -> bool:
    if query.type_filter is not None and entity.entity_type != query.type_filter:
        return False
    if query.name_contains is not None and query.name_contains.lower() not in entity.name.lower():
        return False
    if query.keyword is not None and not _keyword_hit(entity, query.keyword):
        return False
    return True


def _keyword_hit(entity: Entity, keyword: str) -> bool:
    needle = keyword.lower()
    if needle in entity.name.lower() or needle in entity.entity_type.lower():
        return True
    for essential in entity.essentials:
        if needle in essential.name.lower():
            return True
        payload = essential.value.payload
        if isinstance(payload, str) and needle in payload.lower():
            return True
    return False


def get_essentials(doc: ProtocolDocument, entity_id: str,
                   names: list[str] | None = None) -> list[Essential]:
    """An entity's essentials in document order, optionally filtered by name."""
    entity = doc.get(entity_id)
    if entity is None:
        raise UnknownEntityError(entity_id)
    if names is None:
        return list(entity.essentials)
    wanted = set(names)
    return [e for e in entity.essentials if e.name in wanted]
