"""Static knowledge handed to the planner: tree snapshot + type descriptions."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model import (ProtocolDocument, SimplifiedTree, default_registry,
                     iter_entities, render_simplified_tree)

# Essentials whose current values get folded into a type's description so the
# planner can tell similar entities apart without extra tool calls.
KEY_ESSENTIALS = ("KernelEssential", "SliceThicknessEssential",
                  "ReconOrientationEssential")


@dataclass(frozen=True)
class MemoryContext:
    entity_descriptions: dict = field(default_factory=dict)
    simplified_tree: SimplifiedTree = field(default_factory=lambda: SimplifiedTree(()))

    def as_prompt_block(self) -> str:
        lines = ["Protocol structure (type | name | id):",
                 self.simplified_tree.text, "", "Entity type notes:"]
        for entity_type in sorted(self.entity_descriptions):
            lines.append(f"- {entity_type}: {self.entity_descriptions[entity_type]}")
        return "\n".join(lines)


def default_description_catalog() -> dict:
    """Type descriptions from the packaged schema registry."""
    registry = default_registry()
    return {name: info.description for name, info in registry.types.items()}


def _key_values(doc: ProtocolDocument, entity_type: str) -> list[str]:
    seen: dict[str, list[str]] = {}
    for entity in iter_entities(doc.root):
        if entity.entity_type != entity_type:
            continue
        for essential in entity.essentials:
            if essential.name not in KEY_ESSENTIALS:
                continue
            try:
                text = essential.value.scalar_text()
            except ValueError:
                continue
            bucket = seen.setdefault(essential.name, [])
            if text not in bucket:
                bucket.append(text)
    parts = []
    for name in KEY_ESSENTIALS:
        if name in seen:
            label = name.removesuffix("Essential")
            parts.append(f"{label} {'/'.join(seen[name])}")
    return parts


def build_memory(doc: ProtocolDocument,
                 description_catalog: dict | None = None) -> MemoryContext:
    """Describe every entity type present in the document.

    Catalog entries win; anything unknown falls back to a generic line.
    Key configuration values observed on instances (kernel, slice thickness,
    orientation) are appended so descriptions stay protocol-specific.
    """
    catalog = default_description_catalog() if description_catalog is None \
        else description_catalog
    descriptions: dict = {}
    for entity in iter_entities(doc.root):
        if entity.entity_type in descriptions:
            continue
        base = catalog.get(entity.entity_type,
                           f"{entity.entity_type} entity in the scan protocol.")
        values = _key_values(doc, entity.entity_type)
        if values:
            base = f"{base.rstrip('.')}. In this protocol: {'; '.join(values)}."
        descriptions[entity.entity_type] = base
    return MemoryContext(entity_descriptions=descriptions,
                         simplified_tree=render_simplified_tree(doc))
