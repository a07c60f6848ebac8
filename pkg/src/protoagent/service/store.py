"""File-backed session persistence.

One directory per session::

    <root>/<session_id>/
      meta.json        {"id", "created_at"}
      protocol.xml     current document, canonical form
      proposals.json   every proposal, wire format
      history.jsonl    append-only event log, one JSON object per line

All whole-file writes go through write-temp-then-rename so a crash never
leaves a half-written file behind; reloading a store reconstructs the
exact persisted bytes.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

from ..agent import Proposal


def _atomic_write(path: Path, payload: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


@dataclass(frozen=True)
class PersistedSession:
    meta: dict
    protocol_xml: str
    proposals: tuple
    history: tuple


class SessionStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _dir(self, session_id: str) -> Path:
        return self.root / session_id

    def session_ids(self) -> list[str]:
        return sorted(p.name for p in self.root.iterdir()
                      if p.is_dir() and (p / "meta.json").is_file())

    def exists(self, session_id: str) -> bool:
        return (self._dir(session_id) / "meta.json").is_file()

    def create(self, session_id: str, created_at: str, protocol_xml: str) -> None:
        directory = self._dir(session_id)
        directory.mkdir(parents=True)
        _atomic_write(directory / "meta.json",
                      json.dumps({"id": session_id, "created_at": created_at},
                                 indent=2) + "\n")
        self.save_protocol(session_id, protocol_xml)
        self.save_proposals(session_id, [])
        (directory / "history.jsonl").touch()

    def save_protocol(self, session_id: str, protocol_xml: str) -> None:
        _atomic_write(self._dir(session_id) / "protocol.xml", protocol_xml)

    def save_proposals(self, session_id: str, proposals) -> None:
        payload = json.dumps([p.to_json() for p in proposals], indent=2) + "\n"
        _atomic_write(self._dir(session_id) / "proposals.json", payload)

    def append_event(self, session_id: str, event: dict) -> None:
        line = json.dumps(event, sort_keys=True) + "\n"
        with open(self._dir(session_id) / "history.jsonl", "a",
                  encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())

    def load(self, session_id: str) -> PersistedSession:
        directory = self._dir(session_id)
        meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
        protocol_xml = (directory / "protocol.xml").read_text(encoding="utf-8")
        proposals = tuple(Proposal.from_json(item) for item in json.loads(
            (directory / "proposals.json").read_text(encoding="utf-8")))
        history = tuple(json.loads(line) for line in
                        (directory / "history.jsonl").read_text(
                            encoding="utf-8").splitlines() if line.strip())
        return PersistedSession(meta=meta, protocol_xml=protocol_xml,
                                proposals=proposals, history=history)
