"""Gold-labeled evaluation cases.

A case is one directory::

    cases/<id>/
      protocol.xml          starting document
      request.txt           natural-language request  (exactly one of
      request.json          structured request         these two)
      gold_actions.json     expected actions, wire format
      gold_segments/        expected affected subtrees, canonical XML,
                            compared in sorted filename order
      gold_retrieval.json   {"entity_ids": [...], "essentials": [[id, name]]}
      script.json           canned backend replies (mock runs)

The scoring bucket is implied, not stored: structured cases score in the
JSON column, natural-language cases in the column matching their gold
action kind.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..edit import Action, AddEntity, DeleteEntity, SetEssential, action_from_json
from ..errors import EmptyCaseSetError

_KIND_BUCKET = {SetEssential: "Modification", AddEntity: "Adding",
                DeleteEntity: "Deleting"}


@dataclass(frozen=True)
class EvalCase:
    id: str
    directory: Path
    protocol_path: Path
    category: str
    request_text: str | None = None
    request_json: str | None = None
    gold_actions: tuple = ()
    gold_segments: tuple = ()
    gold_entity_ids: frozenset = frozenset()
    gold_essentials: frozenset = frozenset()
    script_path: Path | None = None


def category_for_actions(actions) -> str:
    buckets = {_KIND_BUCKET[type(a)] for a in actions}
    if len(buckets) != 1:
        raise ValueError(f"gold actions span {len(buckets)} categories, "
                         "expected exactly one")
    return buckets.pop()


def load_case(directory: Path) -> EvalCase:
    directory = Path(directory)
    protocol_path = directory / "protocol.xml"
    if not protocol_path.is_file():
        raise ValueError(f"case {directory.name}: protocol.xml missing")

    text_path = directory / "request.txt"
    json_path = directory / "request.json"
    if text_path.is_file() == json_path.is_file():
        raise ValueError(f"case {directory.name}: need exactly one of "
                         "request.txt or request.json")
    request_text = text_path.read_text(encoding="utf-8").strip() \
        if text_path.is_file() else None
    request_json = json_path.read_text(encoding="utf-8") \
        if json_path.is_file() else None

    actions_path = directory / "gold_actions.json"
    if not actions_path.is_file():
        raise ValueError(f"case {directory.name}: gold_actions.json missing")
    actions = tuple(action_from_json(item) for item in
                    json.loads(actions_path.read_text(encoding="utf-8")))
    if not actions:
        raise ValueError(f"case {directory.name}: gold_actions.json is empty")

    segments_dir = directory / "gold_segments"
    segment_files = sorted(segments_dir.glob("*.xml")) if segments_dir.is_dir() else []
    if not segment_files:
        raise ValueError(f"case {directory.name}: gold_segments/ missing or empty")
    segments = tuple(p.read_text(encoding="utf-8") for p in segment_files)

    retrieval_path = directory / "gold_retrieval.json"
    if not retrieval_path.is_file():
        raise ValueError(f"case {directory.name}: gold_retrieval.json missing")
    retrieval = json.loads(retrieval_path.read_text(encoding="utf-8"))
    entity_ids = frozenset(retrieval.get("entity_ids", []))
    essentials = frozenset((pair[0], pair[1])
                           for pair in retrieval.get("essentials", []))
    if not entity_ids:
        raise ValueError(f"case {directory.name}: gold entity_ids is empty")

    script_path = directory / "script.json"
    category = "JSON" if request_json is not None else category_for_actions(actions)
    return EvalCase(id=directory.name, directory=directory,
                    protocol_path=protocol_path, category=category,
                    request_text=request_text, request_json=request_json,
                    gold_actions=actions, gold_segments=segments,
                    gold_entity_ids=entity_ids, gold_essentials=essentials,
                    script_path=script_path if script_path.is_file() else None)


def case_directories(root: Path) -> list[Path]:
    root = Path(root)
    if not root.is_dir():
        raise EmptyCaseSetError(f"case directory {root} does not exist")
    dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not dirs:
        raise EmptyCaseSetError(f"case directory {root} holds no cases")
    return dirs
