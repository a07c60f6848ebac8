"""Compact tree rendering of a protocol, used as the agent's structural memory."""

from __future__ import annotations

from dataclasses import dataclass

from .document import ProtocolDocument, iter_with_depth


@dataclass(frozen=True)
class SimplifiedTree:
    lines: tuple[str, ...]

    @property
    def text(self) -> str:
        return "\n".join(self.lines)


def render_simplified_tree(doc: ProtocolDocument) -> SimplifiedTree:
    """One line per entity, preorder, depth-indented: ``type | name | id``."""
    lines = tuple(
        "  " * depth + f"{entity.entity_type} | {entity.name} | {entity.id}"
        for entity, depth in iter_with_depth(doc.root)
    )
    return SimplifiedTree(lines)


def elide_deepest(tree: SimplifiedTree, max_chars: int) -> SimplifiedTree:
    """Shrink a rendering to fit a prompt budget by dropping the deepest lines first.

    The relative order of surviving lines is preserved; an ellipsis marker is
    appended when anything was dropped.
    """
    if len(tree.text) <= max_chars:
        return tree
    depths = [(len(line) - len(line.lstrip(" "))) // 2 for line in tree.lines]
    keep = list(tree.lines)
    for cutoff in sorted(set(depths), reverse=True):
        keep = [line for line, d in zip(tree.lines, depths) if d < cutoff]
        if len("\n".join(keep)) <= max_chars:
            break
    return SimplifiedTree(tuple(keep) + ("...",))
