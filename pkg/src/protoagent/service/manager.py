"""Session lifecycle: submit requests, review proposals, apply edits.

The manager owns the in-memory session state, serializes work per session
with non-blocking locks (a busy session answers 409 instead of queueing),
and writes every state change through the store before returning. The
session document can only ever change inside an approve decision.
"""

from __future__ import annotations

import hashlib
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..agent import (Proposal, ProposalStatus, SubRequest, build_memory,
                     execute, parse_structured_request, plan, route)
from ..errors import (InvalidProtocolError, ProposalNotFoundError,
                      SessionBusyError, SessionNotFoundError)
from ..llm import ChatGateway, GatewayConfig, make_chat_backend
from ..model import (ProtocolDocument, RuleSet, SchemaRegistry, load_rules,
                     parse_protocol, render_simplified_tree,
                     serialize_protocol, validate_syntax)


def document_hash(xml_text: str) -> str:
    return hashlib.sha256(xml_text.encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class Session:
    id: str
    created_at: str
    doc: ProtocolDocument
    proposals: list = field(default_factory=list)
    history: list = field(default_factory=list)

    def protocol_xml(self) -> str:
        return serialize_protocol(self.doc)

    def find_proposal(self, proposal_id: str) -> Proposal | None:
        for proposal in self.proposals:
            if proposal.id == proposal_id:
                return proposal
        return None


class SessionManager:
    def __init__(self, store, config: GatewayConfig | None = None, *,
                 rules: RuleSet | None = None,
                 registry: SchemaRegistry | None = None):
        self.store = store
        self.config = config or GatewayConfig(backend="mock")
        self.rules = rules if rules is not None else load_rules()
        self.registry = registry
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for session_id in store.session_ids():
            self._sessions[session_id] = self._load(session_id)

    # --- plumbing ---------------------------------------------------------

    def _load(self, session_id: str) -> Session:
        persisted = self.store.load(session_id)
        return Session(id=persisted.meta["id"],
                       created_at=persisted.meta["created_at"],
                       doc=parse_protocol(persisted.protocol_xml),
                       proposals=list(persisted.proposals),
                       history=list(persisted.history))

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def session(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFoundError(f"no session {session_id!r}")
        return session

    def session_ids(self) -> list[str]:
        return sorted(self._sessions)

    def _record(self, session: Session, event: str, payload: dict) -> None:
        entry = {"event": event, "at": _now(), "payload": payload}
        session.history.append(entry)
        self.store.append_event(session.id, entry)

    def _gateway(self) -> ChatGateway:
        return ChatGateway(make_chat_backend(self.config))

    # --- operations -------------------------------------------------------

    def create_session(self, protocol_xml: str) -> Session:
        report = validate_syntax(protocol_xml, registry=self.registry)
        if not report.ok:
            raise InvalidProtocolError("protocol failed validation",
                                       issues=[i.to_json() for i in report.issues])
        doc = parse_protocol(protocol_xml, registry=self.registry)
        session = Session(id=f"sess-{uuid.uuid4().hex[:12]}", created_at=_now(),
                          doc=doc)
        self.store.create(session.id, session.created_at, session.protocol_xml())
        self._sessions[session.id] = session
        return session

    def submit_request(self, session_id: str, *, text: str | None = None,
                       structured_json: str | None = None
                       ) -> tuple[list[Proposal], list[SubRequest]]:
        """Route (or parse), plan, persist. Returns (proposals, others)."""
        session = self.session(session_id)
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusyError(f"session {session_id} is busy")
        try:
            gateway = self._gateway() if text is not None else None
            if text is not None:
                subs = route(text, gateway)
                digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
            else:
                subs = parse_structured_request(structured_json)
                digest = hashlib.sha256(structured_json.encode("utf-8")).hexdigest()
            self._record(session, "RequestSubmitted",
                         {"digest": digest,
                          "mode": "text" if text is not None else "json"})

            memory = build_memory(session.doc)
            created: list[Proposal] = []
            others: list[SubRequest] = []
            for sub in subs:
                if not sub.dispatchable:
                    others.append(sub)
                    continue
                proposal_id = f"prop-{len(session.proposals) + 1}"
                proposal = plan(sub, session.doc, memory, gateway,
                                rules=self.rules, proposal_id=proposal_id)
                session.proposals.append(proposal)
                created.append(proposal)
                self._record(session, "ProposalCreated",
                             {"proposal_id": proposal.id,
                              "status": proposal.status.value})
            self.store.save_proposals(session_id, session.proposals)
            return created, others
        finally:
            lock.release()

    def decide(self, session_id: str, proposal_id: str, decision: str) -> Proposal:
        if decision not in ("approve", "reject"):
            raise ValueError(f"decision must be approve or reject, got {decision!r}")
        session = self.session(session_id)
        lock = self._lock(session_id)
        if not lock.acquire(blocking=False):
            raise SessionBusyError(f"session {session_id} is busy")
        try:
            proposal = session.find_proposal(proposal_id)
            if proposal is None:
                raise ProposalNotFoundError(
                    f"no proposal {proposal_id!r} in session {session_id}")
            index = session.proposals.index(proposal)

            if decision == "reject":
                updated = proposal.advance(ProposalStatus.REJECTED)
                session.proposals[index] = updated
                self.store.save_proposals(session_id, session.proposals)
                self._record(session, "Rejected", {"proposal_id": proposal_id})
                return updated

            approved = proposal.advance(ProposalStatus.APPROVED)
            before_hash = document_hash(session.protocol_xml())
            updated, result = execute(approved, session.doc, rules=self.rules,
                                      registry=self.registry)
            session.proposals[index] = updated
            if updated.status is ProposalStatus.APPLIED:
                session.doc = result.document
                xml_text = session.protocol_xml()
                self.store.save_protocol(session_id, xml_text)
                self.store.save_proposals(session_id, session.proposals)
                self._record(session, "Applied",
                             {"proposal_id": proposal_id,
                              "before_hash": before_hash,
                              "after_hash": document_hash(xml_text),
                              "side_effects": [s.to_json() for s in
                                               result.side_effects]})
            else:
                self.store.save_proposals(session_id, session.proposals)
                self._record(session, "Failed",
                             {"proposal_id": proposal_id,
                              "error": updated.error})
            return updated
        finally:
            lock.release()

    def protocol_with_hash(self, session_id: str) -> tuple[str, str]:
        xml_text = self.session(session_id).protocol_xml()
        return xml_text, document_hash(xml_text)

    def tree_text(self, session_id: str) -> str:
        return render_simplified_tree(self.session(session_id).doc).text
