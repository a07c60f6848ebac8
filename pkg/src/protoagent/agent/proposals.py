"""Planner proposals and their review lifecycle.

A proposal is immutable; review decisions produce a new proposal via
``advance``. Legal moves: Pending -> Approved/Rejected, Approved ->
Applied/Failed. Planners may also create Failed proposals directly when
they cannot produce a usable plan.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from ..edit import EntityRef, action_from_json, action_to_json
from ..errors import InvalidStatusError
from .requests import (RequestCategory, RequestOrigin, SubRequest)


class ProposalStatus(str, enum.Enum):
    PENDING = "Pending"
    APPROVED = "Approved"
    REJECTED = "Rejected"
    APPLIED = "Applied"
    FAILED = "Failed"


_TRANSITIONS = {
    ProposalStatus.PENDING: {ProposalStatus.APPROVED, ProposalStatus.REJECTED},
    ProposalStatus.APPROVED: {ProposalStatus.APPLIED, ProposalStatus.FAILED},
}


@dataclass(frozen=True)
class RetrievedContext:
    entities: tuple = ()
    essentials: tuple = ()  # (entity_id, essential_name) pairs

    def to_json(self) -> dict:
        return {"entities": [ref.to_json() for ref in self.entities],
                "essentials": [list(pair) for pair in self.essentials]}

    @classmethod
    def from_json(cls, data: dict) -> "RetrievedContext":
        return cls(entities=tuple(EntityRef(entity_id=e["entity_id"], name=e["name"],
                                            entity_type=e["entity_type"])
                                  for e in data.get("entities", [])),
                   essentials=tuple((pair[0], pair[1])
                                    for pair in data.get("essentials", [])))


@dataclass(frozen=True)
class Proposal:
    id: str
    subrequest: SubRequest
    retrieved: RetrievedContext = field(default_factory=RetrievedContext)
    actions: tuple = ()
    plan_text: str = ""
    status: ProposalStatus = ProposalStatus.PENDING
    low_confidence: bool = False
    error: str | None = None

    def advance(self, status: ProposalStatus, error: str | None = None) -> "Proposal":
        allowed = _TRANSITIONS.get(self.status, set())
        if status not in allowed:
            raise InvalidStatusError(
                f"proposal {self.id}: cannot go {self.status.value} -> {status.value}")
        return replace(self, status=status, error=error)

    def to_json(self) -> dict:
        sub = {"text": self.subrequest.text,
               "category": self.subrequest.category.value,
               "rationale": self.subrequest.rationale,
               "origin": self.subrequest.origin.value}
        return {"id": self.id, "subrequest": sub,
                "retrieved": self.retrieved.to_json(),
                "actions": [action_to_json(a) for a in self.actions],
                "plan_text": self.plan_text,
                "status": self.status.value,
                "low_confidence": self.low_confidence,
                "error": self.error}

    @classmethod
    def from_json(cls, data: dict) -> "Proposal":
        sub = data["subrequest"]
        subrequest = SubRequest(text=sub["text"],
                                category=RequestCategory(sub["category"]),
                                rationale=sub.get("rationale", ""),
                                origin=RequestOrigin(sub.get("origin", "NaturalLanguage")))
        return cls(id=data["id"], subrequest=subrequest,
                   retrieved=RetrievedContext.from_json(data.get("retrieved", {})),
                   actions=tuple(action_from_json(a) for a in data.get("actions", [])),
                   plan_text=data.get("plan_text", ""),
                   status=ProposalStatus(data["status"]),
                   low_confidence=data.get("low_confidence", False),
                   error=data.get("error"))
