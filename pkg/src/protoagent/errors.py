"""Exception taxonomy shared across the package.

Every domain error carries a stable ``code`` string so the service layer and
the CLI can surface machine-readable errors without string matching.
"""

from __future__ import annotations


class ProtoAgentError(Exception):
    """Base class for all domain errors."""

    code = "ERROR"

    def __init__(self, message: str, **detail):
        super().__init__(message)
        self.message = message
        self.detail = detail


# --- protocol model -------------------------------------------------------


class ProtocolSyntaxError(ProtoAgentError):
    """The XML text is not well formed."""

    code = "SYNTAX"

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        super().__init__(message, line=line, column=column)
        self.line = line
        self.column = column


class SchemaError(ProtoAgentError):
    """Well-formed XML that violates the protocol schema."""

    code = "SCHEMA"

    def __init__(self, message: str, code: str, path: str = ""):
        super().__init__(message, path=path)
        self.code = code
        self.path = path


class RuleSetError(ProtoAgentError):
    """The structure-rule file itself is invalid."""

    code = "RULESET"


# --- edit toolset ---------------------------------------------------------


class EmptyQueryError(ProtoAgentError):
    code = "EMPTY_QUERY"


class UnknownEntityError(ProtoAgentError):
    code = "UNKNOWN_ENTITY"

    def __init__(self, entity_id: str):
        super().__init__(f"no entity with id {entity_id!r}", entity_id=entity_id)
        self.entity_id = entity_id


class UnknownEssentialError(ProtoAgentError):
    code = "UNKNOWN_ESSENTIAL"


class TypeMismatchError(ProtoAgentError):
    code = "TYPE_MISMATCH"


class ValueNotAllowedError(ProtoAgentError):
    code = "VALUE_NOT_ALLOWED"


class PlacementNotAllowedError(ProtoAgentError):
    code = "PLACEMENT_NOT_ALLOWED"


class CannotDeleteRootError(ProtoAgentError):
    code = "CANNOT_DELETE_ROOT"


class ActionError(ProtoAgentError):
    """An action in a transactional batch failed; nothing was applied."""

    code = "ACTION_FAILED"

    def __init__(self, index: int, cause: ProtoAgentError):
        super().__init__(f"action {index} failed: {cause.message}", index=index)
        self.index = index
        self.cause = cause


# --- llm gateway ----------------------------------------------------------


class BackendError(ProtoAgentError):
    code = "BACKEND"


class RateLimitedError(BackendError):
    code = "RATE_LIMITED"

    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class ScriptMissError(BackendError):
    """A scripted backend received a prompt its script does not cover."""

    code = "SCRIPT_MISS"


class SchemaViolationError(ProtoAgentError):
    """The model kept producing tool arguments that fail the declared schema."""

    code = "SCHEMA_VIOLATION"


# --- agent core -----------------------------------------------------------


class JsonSchemaError(ProtoAgentError):
    """A structured JSON request failed schema validation."""

    code = "JSON_SCHEMA"

    def __init__(self, message: str, pointer: str):
        super().__init__(message, pointer=pointer)
        self.pointer = pointer


class MalformedRouterOutputError(ProtoAgentError):
    code = "MALFORMED_ROUTER_OUTPUT"


class MalformedPlanError(ProtoAgentError):
    code = "MALFORMED_PLAN"


class UnresolvedReferenceError(ProtoAgentError):
    code = "UNRESOLVED_REFERENCE"


class InvalidStatusError(ProtoAgentError):
    code = "INVALID_STATUS"


# --- evaluation -----------------------------------------------------------


class DimensionMismatchError(ProtoAgentError):
    code = "DIMENSION_MISMATCH"


class ZeroVectorError(ProtoAgentError):
    code = "ZERO_VECTOR"


class EmptyGoldError(ProtoAgentError):
    code = "EMPTY_GOLD"


class EmptyCaseSetError(ProtoAgentError):
    code = "EMPTY_CASE_SET"


class MalformedOutputError(ProtoAgentError):
    code = "MALFORMED_OUTPUT"


# --- service --------------------------------------------------------------


class InvalidProtocolError(ProtoAgentError):
    """An uploaded protocol failed syntax or schema validation."""

    code = "INVALID_PROTOCOL"

    def __init__(self, message: str, issues: list | None = None):
        super().__init__(message, issues=issues or [])
        self.issues = issues or []


class SessionNotFoundError(ProtoAgentError):
    code = "SESSION_NOT_FOUND"


class ProposalNotFoundError(ProtoAgentError):
    code = "PROPOSAL_NOT_FOUND"


class SessionBusyError(ProtoAgentError):
    """Another request pipeline is currently running for this session."""

    code = "SESSION_BUSY"
