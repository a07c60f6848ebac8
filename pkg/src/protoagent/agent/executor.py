"""Apply an approved proposal to the session document."""

from __future__ import annotations

from ..edit import EditResult, apply_actions
from ..errors import ActionError, InvalidStatusError
from ..model import ProtocolDocument, RuleSet, SchemaRegistry, load_rules
from .proposals import Proposal, ProposalStatus


def execute(proposal: Proposal, doc: ProtocolDocument, *,
            rules: RuleSet | None = None,
            registry: SchemaRegistry | None = None
            ) -> tuple[Proposal, EditResult | None]:
    """Run the proposal's actions; returns the advanced proposal and, on
    success, the edit result holding the new document.

    Only Approved proposals may run. Application is all-or-nothing: any
    failure yields a Failed proposal and leaves the document untouched.
    """
    if proposal.status is not ProposalStatus.APPROVED:
        raise InvalidStatusError(
            f"cannot execute a {proposal.status.value} proposal")
    rules = rules if rules is not None else load_rules()
    try:
        result = apply_actions(doc, proposal.actions, rules=rules,
                               registry=registry)
    except ActionError as exc:
        return proposal.advance(ProposalStatus.FAILED, error=str(exc)), None
    return proposal.advance(ProposalStatus.APPLIED), result
