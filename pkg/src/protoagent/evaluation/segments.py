"""Affected-subtree extraction for exact-match scoring.

A segment is the canonical XML of the smallest entity subtree that still
contains an action's change after it was applied:

- set_essential: the edited entity itself;
- add_entity: the parent that received the copy;
- delete_entity: the nearest ancestor that survived (cascade removal can
  take compound parents with it).
"""

from __future__ import annotations

from ..edit import Action, AddEntity, DeleteEntity, SetEssential
from ..model import ProtocolDocument, serialize_entity, serialize_protocol


def _surviving_ancestor(before: ProtocolDocument, after: ProtocolDocument,
                        entity_id: str) -> str:
    path = before.path_to(entity_id)
    for ancestor in reversed(path[:-1]):
        if after.get(ancestor.id) is not None:
            return ancestor.id
    return after.root.id


def segment_roots(before: ProtocolDocument, after: ProtocolDocument,
                  actions) -> list[str]:
    """Ids of the subtree roots touched by the actions, deduplicated in
    action order."""
    roots: list[str] = []
    for action in actions:
        if isinstance(action, SetEssential):
            root_id = action.entity_id
        elif isinstance(action, AddEntity):
            root_id = action.parent_id
        elif isinstance(action, DeleteEntity):
            root_id = _surviving_ancestor(before, after, action.entity_id)
        else:
            raise TypeError(f"not an action: {action!r}")
        if root_id not in roots:
            roots.append(root_id)
    return roots


def affected_segments(before: ProtocolDocument, after: ProtocolDocument,
                      actions) -> list[str]:
    segments = []
    for root_id in segment_roots(before, after, actions):
        entity = after.get(root_id)
        if entity.id == after.root.id:
            segments.append(serialize_protocol(after))
        else:
            segments.append(serialize_entity(entity))
    return segments
