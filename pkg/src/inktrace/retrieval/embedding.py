"""Embedding providers: an HTTP client and a deterministic offline fallback.

The HTTP contract is ``POST {"texts": [...]}`` returning
``{"provider_id": str, "embeddings": [[...], ...]}``. Vectors are always
re-normalized locally so cosine scores are plain dot products.
"""

from __future__ import annotations

import hashlib
import re
from typing import Protocol, Sequence

import httpx
import numpy as np

from ..errors import BadResponse, DimensionMismatch, Timeout, Unreachable

_TOKEN = re.compile(r"[a-z0-9']+")


class Embedder(Protocol):
    provider_id: str

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    safe = np.where(norms == 0, 1.0, norms)
    return vectors / safe


class HashingEmbedder:
    """Deterministic bag-of-hashed-tokens embedder.

    Test/offline fallback only: it captures token overlap, not meaning.
    Tokens hash (blake2b) to a bucket and a sign; identical texts embed
    identically on any platform. Texts with no tokens map to basis e0.
    """

    def __init__(self, dim: int = 64):
        self.dim = dim
        self.provider_id = f"hashing-v1-d{dim}"

    def _token_slot(self, token: str) -> tuple[int, float]:
        digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
        value = int.from_bytes(digest, "big")
        return value % self.dim, 1.0 if (value >> 63) & 1 else -1.0

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float64)
        for i, text in enumerate(texts):
            for token in _TOKEN.findall(text.lower()):
                slot, sign = self._token_slot(token)
                out[i, slot] += sign
            if not out[i].any():
                out[i, 0] = 1.0
        return normalize_rows(out)


class HttpEmbedder:
    """Client for a remote embedding provider."""

    def __init__(self, endpoint: str, provider_id: str | None = None,
                 timeout: float = 30.0, client: httpx.Client | None = None):
        self.endpoint = endpoint
        self.provider_id = provider_id or endpoint
        self.timeout = timeout
        self._client = client

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        own = self._client is None
        client = self._client or httpx.Client(timeout=self.timeout)
        try:
            response = client.post(self.endpoint, json={"texts": list(texts)},
                                   timeout=self.timeout)
        except httpx.TimeoutException as exc:
            raise Timeout(str(exc)) from None
        except httpx.TransportError as exc:
            raise Unreachable(str(exc)) from None
        finally:
            if own:
                client.close()
        if response.status_code < 200 or response.status_code >= 300:
            raise BadResponse(response.text[:200], status=response.status_code)
        try:
            payload = response.json()
            vectors = payload["embeddings"]
        except Exception:
            raise BadResponse("embedding response is not "
                              '{"embeddings": [...]}') from None
        if len(vectors) != len(texts):
            raise BadResponse(f"expected {len(texts)} vectors, "
                              f"got {len(vectors)}")
        dims = {len(v) for v in vectors}
        if len(dims) > 1:
            raise DimensionMismatch(f"ragged embedding batch: {sorted(dims)}")
        if payload.get("provider_id"):
            self.provider_id = payload["provider_id"]
        return normalize_rows(np.asarray(vectors, dtype=np.float64))
