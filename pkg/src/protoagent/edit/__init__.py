"""Edit toolset: retrieval, attribute management, transactional application."""

from .actions import (
    ID_ASSIGNED,
    PARENT_REMOVED,
    Action,
    AddEntity,
    DeleteEntity,
    SetEssential,
    SideEffect,
    action_from_json,
    action_to_json,
    value_from_json,
    value_to_json,
)
from .query import EntityQuery, EntityRef, get_essentials, retrieve_entities
from .toolset import (
    EditResult,
    add_entity_from_template,
    apply_actions,
    delete_entity,
    set_essential,
)

__all__ = [
    "ID_ASSIGNED",
    "PARENT_REMOVED",
    "Action",
    "AddEntity",
    "DeleteEntity",
    "SetEssential",
    "SideEffect",
    "action_from_json",
    "action_to_json",
    "value_from_json",
    "value_to_json",
    "EntityQuery",
    "EntityRef",
    "get_essentials",
    "retrieve_entities",
    "EditResult",
    "add_entity_from_template",
    "apply_actions",
    "delete_entity",
    "set_essential",
]
