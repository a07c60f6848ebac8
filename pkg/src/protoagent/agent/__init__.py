"""Router, memory, planner and executor for the edit pipeline."""

from .executor import execute
from .memory import (KEY_ESSENTIALS, MemoryContext, build_memory,
                     default_description_catalog)
from .planner import MAX_PLANNER_TURNS, plan, planner_prompt, planner_tools
from .proposals import Proposal, ProposalStatus, RetrievedContext
from .requests import (RequestCategory, RequestOrigin, Selector,
                       StructuredRequest, SubRequest, parse_structured_request)
from .router import route, router_prompt

__all__ = [
    "execute",
    "KEY_ESSENTIALS",
    "MemoryContext",
    "build_memory",
    "default_description_catalog",
    "MAX_PLANNER_TURNS",
    "plan",
    "planner_prompt",
    "planner_tools",
    "Proposal",
    "ProposalStatus",
    "RetrievedContext",
    "RequestCategory",
    "RequestOrigin",
    "Selector",
    "StructuredRequest",
    "SubRequest",
    "parse_structured_request",
    "route",
    "router_prompt",
]
