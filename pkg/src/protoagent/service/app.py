"""REST layer over the session manager.

Error responses share one JSON shape: ``{"code", "message", "detail"}``.
The code strings come straight from the exception taxonomy, so clients can
branch without parsing messages.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import Body, FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..errors import (BackendError, InvalidProtocolError, InvalidStatusError,
                      JsonSchemaError, MalformedPlanError,
                      MalformedRouterOutputError, ProposalNotFoundError,
                      ProtoAgentError, SessionBusyError, SessionNotFoundError)
from ..llm import GatewayConfig
from .manager import SessionManager
from .store import SessionStore

_STATUS_BY_ERROR = (
    (SessionNotFoundError, 404),
    (ProposalNotFoundError, 404),
    (SessionBusyError, 409),
    (InvalidStatusError, 409),
    (InvalidProtocolError, 400),
    (JsonSchemaError, 422),
    (BackendError, 502),
    (MalformedRouterOutputError, 502),
    (MalformedPlanError, 502),
)


def _status_for(exc: ProtoAgentError) -> int:
    for kind, status in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return status
    return 400


def _error_body(exc: ProtoAgentError) -> dict:
    detail = dict(exc.detail)
    if isinstance(exc, (BackendError, MalformedRouterOutputError,
                        MalformedPlanError)):
        detail["retry"] = "the language backend misbehaved; retry the request"
    return {"code": exc.code, "message": exc.message, "detail": detail}


def _bad_request(message: str, status: int = 422) -> JSONResponse:
    return JSONResponse(status_code=status,
                        content={"code": "BAD_REQUEST", "message": message,
                                 "detail": {}})


def _session_view(manager: SessionManager, session_id: str) -> dict:
    session = manager.session(session_id)
    return {"id": session.id, "created_at": session.created_at,
            "tree": manager.tree_text(session_id),
            "proposal_count": len(session.proposals)}


def _sub_view(sub) -> dict:
    return {"text": sub.text, "category": sub.category.value,
            "rationale": sub.rationale, "status": "NotDispatchable"}


def create_app(manager: SessionManager | None = None, *,
               store_dir: str | Path | None = None,
               config: GatewayConfig | None = None,
               cors_origins: list[str] | None = None) -> FastAPI:
    """Build the application; pass either a manager or a store directory."""
    if manager is None:
        if store_dir is None:
            raise ValueError("create_app needs a manager or a store_dir")
        manager = SessionManager(SessionStore(store_dir), config)

    app = FastAPI(title="protoagent", docs_url=None, redoc_url=None)
    app.state.manager = manager
    app.add_middleware(CORSMiddleware,
                       allow_origins=cors_origins or ["*"],
                       allow_methods=["*"], allow_headers=["*"],
                       expose_headers=["ETag"])

    @app.exception_handler(ProtoAgentError)
    async def _domain_error(request: Request, exc: ProtoAgentError):
        return JSONResponse(status_code=_status_for(exc),
                            content=_error_body(exc))

    @app.get("/health")
    def health():
        return {"status": "ok", "sessions": len(manager.session_ids())}

    @app.get("/sessions")
    def list_sessions():
        return {"sessions": [_session_view(manager, sid)
                             for sid in manager.session_ids()]}

    @app.post("/sessions", status_code=201)
    def create_session(body: dict = Body(...)):
        xml_text = body.get("protocol_xml")
        if not isinstance(xml_text, str) or not xml_text.strip():
            return _bad_request("body must contain a protocol_xml string")
        session = manager.create_session(xml_text)
        return _session_view(manager, session.id)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_view(manager, session_id)

    @app.post("/sessions/{session_id}/requests")
    def submit_request(session_id: str, body: dict = Body(...)):
        if "text" in body:
            text = body["text"]
            if not isinstance(text, str):
                return _bad_request("text must be a string")
            proposals, others = manager.submit_request(session_id, text=text)
        elif "operation" in body:
            proposals, others = manager.submit_request(
                session_id, structured_json=json.dumps(body))
        else:
            return _bad_request(
                "body must contain either text or a structured operation")
        return {"proposals": [p.to_json() for p in proposals],
                "not_dispatchable": [_sub_view(s) for s in others]}

    @app.get("/sessions/{session_id}/proposals")
    def get_proposals(session_id: str):
        session = manager.session(session_id)
        return {"proposals": [p.to_json() for p in session.proposals]}

    @app.post("/sessions/{session_id}/proposals/{proposal_id}/decision")
    def decide(session_id: str, proposal_id: str, body: dict = Body(...)):
        decision = body.get("decision")
        if decision not in ("approve", "reject"):
            return _bad_request('decision must be "approve" or "reject"')
        proposal = manager.decide(session_id, proposal_id, decision)
        return proposal.to_json()

    @app.get("/sessions/{session_id}/protocol")
    def get_protocol(session_id: str):
        xml_text, digest = manager.protocol_with_hash(session_id)
        return Response(content=xml_text, media_type="application/xml",
                        headers={"ETag": f'"{digest}"'})

    @app.get("/sessions/{session_id}/history")
    def get_history(session_id: str):
        return {"events": list(manager.session(session_id).history)}

    return app
