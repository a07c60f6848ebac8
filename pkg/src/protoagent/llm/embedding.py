"""Text embedding backends.

The hashing embedder is the offline stand-in for a remote embedding model:
a seeded feature-hashing bag of words in a fixed 256-dimensional space.  It
is order-invariant over tokens and fully deterministic, which is what makes
the faithfulness metric reproducible without network access.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

import numpy as np

from ..errors import BackendError

MOCK_DIM = 256

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]
    model_id: str

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not all(np.isfinite(self.values)):
            raise ValueError("embedding values must be finite")

    def __len__(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


class HashingEmbedder:
    """Seeded bag-of-words feature hashing with signed buckets."""

    def __init__(self, dim: int = MOCK_DIM, seed: int = 0):
        self.dim = dim
        self.seed = seed
        self.model_id = f"hashed-bow-{dim}-seed{seed}"

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            digest = hashlib.sha256(f"{self.seed}|{token}".encode("utf-8")).digest()
            index = int.from_bytes(digest[:4], "big") % self.dim
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            vec[index] += sign
        return EmbeddingVector(tuple(vec), self.model_id)


class HttpEmbedder:
    """Remote embedding API client (OpenAI-style /embeddings contract)."""

    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 timeout: float = 30.0):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout
        self.model_id = model

    def embed(self, text: str) -> EmbeddingVector:
        import httpx

        if not text:
            raise ValueError("cannot embed empty text")
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(f"{self.base_url}/embeddings",
                                  json={"model": self.model, "input": [text]},
                                  headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise BackendError(f"embedding request failed: {exc}") from exc
        if response.status_code != 200:
            raise BackendError(
                f"embedding endpoint returned {response.status_code}: "
                f"{response.text[:200]}")
        try:
            values = response.json()["data"][0]["embedding"]
        except (KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"malformed embedding response: {exc}") from exc
        return EmbeddingVector(tuple(values), self.model_id)
