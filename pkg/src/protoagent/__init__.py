"""protoagent: LLM-agent editing of hierarchical XML scan protocols.

Subpackages
-----------
model       document types, XML parsing/serialization, validation, tree view
edit        retrieval and transactional edit toolset
llm         chat/embedding gateway with HTTP and scripted mock backends
agent       router, memory, planner, executor
evaluation  metrics (syntax rate, plan accuracy/faithfulness, retrieval) and
            the batch benchmark
service     REST service with human-in-the-loop review and file persistence
cli         operator entry points
"""

__version__ = "0.1.0"
