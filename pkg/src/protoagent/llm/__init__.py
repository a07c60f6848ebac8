"""Chat and embedding backends plus the validating gateway."""

from .config import (DEFAULT_MAX_INPUT_CHARS, GatewayConfig,
                     gateway_config_from_dict, load_gateway_config,
                     make_chat_backend, make_embedder)
from .embedding import MOCK_DIM, EmbeddingVector, HashingEmbedder, HttpEmbedder
from .gateway import ChatGateway
from .http import HttpChatBackend
from .messages import (ChatMessage, ChatParams, ToolCall, ToolSchema,
                       conversation_digest)
from .mock import (RecordingChatBackend, ScriptedChatBackend, ScriptedExchange,
                   load_script, save_script)

__all__ = [
    "DEFAULT_MAX_INPUT_CHARS",
    "GatewayConfig",
    "gateway_config_from_dict",
    "load_gateway_config",
    "make_chat_backend",
    "make_embedder",
    "MOCK_DIM",
    "EmbeddingVector",
    "HashingEmbedder",
    "HttpEmbedder",
    "ChatGateway",
    "HttpChatBackend",
    "ChatMessage",
    "ChatParams",
    "ToolCall",
    "ToolSchema",
    "conversation_digest",
    "RecordingChatBackend",
    "ScriptedChatBackend",
    "ScriptedExchange",
    "load_script",
    "save_script",
]
