"""Editing primitives over immutable protocol documents.

All functions are pure: they return new documents and never touch their
inputs, which is what makes ``apply_actions`` trivially transactional.
Deletion repairs the tree by cascading upward through compound entities left
childless, so edited protocols never carry dangling group nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (
    ActionError,
    CannotDeleteRootError,
    PlacementNotAllowedError,
    ProtoAgentError,
    TypeMismatchError,
    UnknownEntityError,
    UnknownEssentialError,
    ValueNotAllowedError,
)
from ..model import Entity, Essential, ProtocolDocument, RuleSet, TypedValue, iter_entities
from ..model.schema import SchemaRegistry, default_registry
from .actions import (
    ID_ASSIGNED,
    PARENT_REMOVED,
    Action,
    AddEntity,
    DeleteEntity,
    SetEssential,
    SideEffect,
)


@dataclass(frozen=True)
class EditResult:
    document: ProtocolDocument
    applied: tuple[Action, ...] = ()
    side_effects: tuple[SideEffect, ...] = field(default_factory=tuple)


def set_essential(doc: ProtocolDocument, entity_id: str, essential_name: str,
                  new_value: TypedValue, *, create_missing: bool = True,
                  strict: bool = True, registry: SchemaRegistry | None = None,
                  rules: RuleSet | None = None,
                  enforce_values: bool = False) -> ProtocolDocument:
    """Return a document identical except for one essential.

    A missing essential is created when ``create_missing`` is set and the name
    is registered for the entity type (or strict mode is off).  With
    ``enforce_values`` the rule file's allowed-value sets are checked too.
    """
    if registry is None:
        registry = default_registry()
    entity = doc.get(entity_id)
    if entity is None:
        raise UnknownEntityError(entity_id)

    existing = entity.essential(essential_name)
    if existing is not None:
        if existing.value.value_type != new_value.value_type:
            raise TypeMismatchError(
                f"essential {essential_name!r} holds {existing.value.value_type}, "
                f"got {new_value.value_type}")
    else:
        registered = registry.essential_type(entity.entity_type, essential_name)
        if strict and registered is None:
            raise UnknownEssentialError(
                f"essential {essential_name!r} is not registered for "
                f"{entity.entity_type}")
        if not create_missing:
            raise UnknownEssentialError(
                f"entity {entity_id!r} has no essential {essential_name!r}")
        if registered is not None and registered != new_value.value_type:
            raise TypeMismatchError(
                f"essential {essential_name!r} is declared {registered}, "
                f"got {new_value.value_type}")
    if enforce_values and rules is not None and not rules.value_allowed(essential_name, new_value):
        raise ValueNotAllowedError(
            f"value {new_value.payload!r} is not allowed for {essential_name}")

    def replace(target: Entity) -> Entity:
        if target.essential(essential_name) is None:
            essentials = target.essentials + (Essential(essential_name, new_value),)
        else:
            essentials = tuple(
                Essential(essential_name, new_value) if e.name == essential_name else e
                for e in target.essentials)
        return Entity(target.id, target.name, target.entity_type,
                      essentials, target.children)

    root, _ = _transform(doc.root, entity_id, replace)
    return doc.replace_root(root)


def add_entity_from_template(doc: ProtocolDocument, template_entity_id: str,
                             parent_id: str,
                             overrides: tuple[tuple[str, TypedValue], ...] = (),
                             new_name: str | None = None, *,
                             rules: RuleSet | None = None,
                             registry: SchemaRegistry | None = None,
                             enforce_values: bool = False) -> EditResult:
    """Deep-copy a template subtree and append it as the parent's last child.

    Every copied entity receives a fresh ``<original>-copy-<n>`` id, recorded
    as IdAssigned side effects; overrides are applied to the copy's root.
    """
    if registry is None:
        registry = default_registry()
    template = doc.get(template_entity_id)
    if template is None:
        raise UnknownEntityError(template_entity_id)
    parent = doc.get(parent_id)
    if parent is None:
        raise UnknownEntityError(parent_id)
    if rules is not None and not rules.allows_child(parent.entity_type, template.entity_type):
        raise PlacementNotAllowedError(
            f"{parent.entity_type} does not admit children of type "
            f"{template.entity_type}")

    used = doc.entity_ids()
    side_effects: list[SideEffect] = []
    copy = _copy_with_fresh_ids(template, used, side_effects)
    if new_name is not None:
        if not new_name:
            raise ValueError("new_name must be non-empty")
        copy = Entity(copy.id, new_name, copy.entity_type, copy.essentials, copy.children)
    copy = _apply_overrides(copy, overrides, registry=registry, rules=rules,
                            enforce_values=enforce_values)

    def append(target: Entity) -> Entity:
        return Entity(target.id, target.name, target.entity_type,
                      target.essentials, target.children + (copy,))

    root, _ = _transform(doc.root, parent_id, append)
    action = AddEntity(template_entity_id, parent_id, overrides, new_name)
    return EditResult(document=doc.replace_root(root), applied=(action,),
                      side_effects=tuple(side_effects))


def delete_entity(doc: ProtocolDocument, entity_id: str, *,
                  rules: RuleSet) -> EditResult:
    """Remove a subtree, then cascade-remove compound ancestors left childless."""
    if doc.get(entity_id) is None:
        raise UnknownEntityError(entity_id)
    if entity_id == doc.root.id:
        raise CannotDeleteRootError("the protocol root cannot be deleted")
    path = doc.path_to(entity_id)
    assert path is not None
    ancestors = path[:-1]  # root .. direct parent

    root, _ = _transform(doc.root, entity_id, lambda _: None)
    side_effects: list[SideEffect] = []
    for ancestor in reversed(ancestors):
        if ancestor.id == root.id:
            break
        current = _find(root, ancestor.id)
        if current is None:
            break
        if current.entity_type in rules.compound_types and not current.children:
            root, _ = _transform(root, current.id, lambda _: None)
            side_effects.append(SideEffect(PARENT_REMOVED, {
                "entity_id": current.id, "name": current.name,
                "entity_type": current.entity_type}))
        else:
            break
    action = DeleteEntity(entity_id)
    return EditResult(document=doc.replace_root(root), applied=(action,),
                      side_effects=tuple(side_effects))


def apply_actions(doc: ProtocolDocument, actions: list[Action] | tuple[Action, ...], *,
                  rules: RuleSet, registry: SchemaRegistry | None = None) -> EditResult:
    """Apply actions in order against the evolving document.

    Transactional: because every step is pure, a failure leaves the caller's
    document untouched; the raised ActionError names the failing index.
    """
    current = doc
    side_effects: list[SideEffect] = []
    for index, action in enumerate(actions):
        try:
            if isinstance(action, SetEssential):
                current = set_essential(current, action.entity_id,
                                        action.essential_name, action.new_value,
                                        registry=registry)
            elif isinstance(action, AddEntity):
                result = add_entity_from_template(
                    current, action.template_entity_id, action.parent_id,
                    action.overrides, action.new_name, rules=rules,
                    registry=registry)
                current = result.document
                side_effects.extend(result.side_effects)
            elif isinstance(action, DeleteEntity):
                result = delete_entity(current, action.entity_id, rules=rules)
                current = result.document
                side_effects.extend(result.side_effects)
            else:
                raise TypeError(f"not an action: {action!r}")
        except ProtoAgentError as exc:
            raise ActionError(index, exc) from exc
    return EditResult(document=current, applied=tuple(actions),
                      side_effects=tuple(side_effects))


# --- internals ------------------------------------------------------------


def _transform(entity: Entity, target_id: str, fn):
    """Rebuild the spine above target_id, applying fn (None removes the node)."""
    if entity.id == target_id:
        return fn(entity), True
    hit = False
    new_children: list[Entity] = []
    for child in entity.children:
        if hit:
            new_children.append(child)
            continue
        new_child, child_hit = _transform(child, target_id, fn)
        if child_hit:
            hit = True
            if new_child is not None:
                new_children.append(new_child)
        else:
            new_children.append(child)
    if not hit:
        return entity, False
    return Entity(entity.id, entity.name, entity.entity_type,
                  entity.essentials, tuple(new_children)), True


def _find(entity: Entity, entity_id: str) -> Entity | None:
    for node in iter_entities(entity):
        if node.id == entity_id:
            return node
    return None


def _copy_with_fresh_ids(template: Entity, used: set[str],
                         side_effects: list[SideEffect]) -> Entity:
    new_id = _fresh_id(template.id, used)
    used.add(new_id)
    side_effects.append(SideEffect(ID_ASSIGNED, {
        "source_id": template.id, "new_id": new_id}))
    children = tuple(_copy_with_fresh_ids(c, used, side_effects)
                     for c in template.children)
    return Entity(new_id, template.name, template.entity_type,
                  template.essentials, children)


def _fresh_id(base: str, used: set[str]) -> str:
    n = 1
    while f"{base}-copy-{n}" in used:
        n += 1
    return f"{base}-copy-{n}"


def _apply_overrides(entity: Entity, overrides, *, registry: SchemaRegistry,
                     rules: RuleSet | None, enforce_values: bool) -> Entity:
    for name, value in overrides:
        existing = entity.essential(name)
        if existing is not None:
            if existing.value.value_type != value.value_type:
                raise TypeMismatchError(
                    f"override {name!r}: template holds {existing.value.value_type}, "
                    f"got {value.value_type}")
            essentials = tuple(Essential(name, value) if e.name == name else e
                               for e in entity.essentials)
        else:
            registered = registry.essential_type(entity.entity_type, name)
            if registered is None:
                raise UnknownEssentialError(
                    f"override {name!r} is neither in the template nor registered "
                    f"for {entity.entity_type}")
            if registered != value.value_type:
                raise TypeMismatchError(
                    f"override {name!r} is declared {registered}, got {value.value_type}")
            essentials = entity.essentials + (Essential(name, value),)
        if enforce_values and rules is not None and not rules.value_allowed(name, value):
            raise ValueNotAllowedError(
                f"override value {value.payload!r} is not allowed for {name}")
        entity = Entity(entity.id, entity.name, entity.entity_type,
                        essentials, entity.children)
    return entity
