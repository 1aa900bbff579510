"""The four corpus segmentation strategies.

Character and recursive chunking operate on flat text and are lossless
(concatenation, minus overlap, restores the input). Semantic and k-means
chunking operate on sentences with one embedding per sentence and return
index groups that preserve the sentence multiset.
"""

from __future__ import annotations

import numpy as np

from ..errors import InvalidK, InvalidParams, LengthMismatch

STRATEGIES = ("char", "recursive", "semantic", "kmeans")
DEFAULT_SEPARATORS = ("\n\n", ". ", " ")


def chunk_char(text: str, size: int, overlap: int = 0) -> list[str]:
    """Fixed-size windows stepping by size - overlap; the short remainder
    at the end is kept."""
    if size <= 0 or overlap < 0 or size <= overlap:
        raise InvalidParams(f"need size > overlap >= 0, got {size}, {overlap}")
    if not text:
        return []
    step = size - overlap
    return [text[start:start + size] for start in range(0, len(text), step)]


def _split_after(text: str, sep: str) -> list[str]:
    """Split keeping the separator attached to the preceding piece."""
    pieces = []
    start = 0
    while True:
        idx = text.find(sep, start)
        if idx < 0:
            break
        pieces.append(text[start:idx + len(sep)])
        start = idx + len(sep)
    if start < len(text):
        pieces.append(text[start:])
    return pieces


def chunk_recursive(text: str, max_size: int,
                    separators: tuple[str, ...] = DEFAULT_SEPARATORS) -> list[str]:
    """Split at the coarsest separator; oversize pieces recurse with the
    next one, falling back to character windows."""
    if not text:
        return []
    if len(text) <= max_size:
        return [text]
    if not separators:
        return chunk_char(text, max_size, 0)
    pieces = _split_after(text, separators[0])
    if len(pieces) <= 1:
        return chunk_recursive(text, max_size, separators[1:])
    out: list[str] = []
    for piece in pieces:
        if len(piece) <= max_size:
            out.append(piece)
        else:
            out.extend(chunk_recursive(piece, max_size, separators[1:]))
    return out


def _as_unit_rows(embeddings) -> np.ndarray:
    arr = np.asarray(embeddings, dtype=np.float64)
    if arr.ndim != 2:
        raise LengthMismatch("embeddings must be a 2-D array")
    return arr


def chunk_semantic(sentences: list[str], embeddings,
                   similarity_threshold: float = 0.75) -> list[list[int]]:
    """Greedy left-to-right grouping by cosine against the running mean.

    The current group absorbs the next sentence while its cosine to the
    mean of the group's embeddings stays at or above the threshold.
    """
    emb = _as_unit_rows(embeddings)
    if len(sentences) != emb.shape[0]:
        raise LengthMismatch(f"{len(sentences)} sentences vs "
                             f"{emb.shape[0]} embeddings")
    if not sentences:
        return []
    groups: list[list[int]] = [[0]]
    running = emb[0].copy()
    for i in range(1, len(sentences)):
        mean = running / len(groups[-1])
        denom = np.linalg.norm(mean) * np.linalg.norm(emb[i])
        cos = float(mean @ emb[i] / denom) if denom > 0 else 0.0
        if cos >= similarity_threshold:
            groups[-1].append(i)
            running += emb[i]
        else:
            groups.append([i])
            running = emb[i].copy()
    return groups


def kmeans_cluster(points: np.ndarray, k: int, seed: int = 0,
                   max_iter: int = 50, tol: float = 1e-6) -> np.ndarray:
    """Plain Lloyd iterations with k-means++ seeding under a fixed seed.

    Deterministic: ties in assignment go to the lowest centroid index and
    empty clusters reseed to the point farthest from its centroid.
    Terminates when the largest centroid shift drops below ``tol``.
    """
    n = points.shape[0]
    rng = np.random.default_rng(seed)
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.integers(n)]
    d2 = np.sum((points - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = d2.sum()
        if total <= 0:
            centroids[j] = points[rng.integers(n)]
        else:
            centroids[j] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, np.sum((points - centroids[j]) ** 2, axis=1))

    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        dists = ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        assign = dists.argmin(axis=1)  # argmin takes the lowest index on ties
        shift = 0.0
        for j in range(k):
            members = points[assign == j]
            if len(members) == 0:
                worst = int(np.argmax(dists[np.arange(n), assign]))
                new = points[worst]
                assign[worst] = j
            else:
                new = members.mean(axis=0)
            shift = max(shift, float(np.linalg.norm(new - centroids[j])))
            centroids[j] = new
        if shift < tol:
            break
    return assign


def chunk_kmeans(sentences: list[str], embeddings, k: int,
                 seed: int = 0, max_iter: int = 50,
                 tol: float = 1e-6) -> list[list[int]]:
    """K-means over sentence embeddings; each cluster's sentences form one
    chunk in original order. Chunks are ordered by first sentence index."""
    emb = _as_unit_rows(embeddings)
    if len(sentences) != emb.shape[0]:
        raise LengthMismatch(f"{len(sentences)} sentences vs "
                             f"{emb.shape[0]} embeddings")
    n = len(sentences)
    if k < 1 or k > n:
        raise InvalidK(f"k={k} with {n} sentences")
    assign = kmeans_cluster(emb, k, seed=seed, max_iter=max_iter, tol=tol)
    groups = [[i for i in range(n) if assign[i] == j] for j in range(k)]
    groups = [g for g in groups if g]
    groups.sort(key=lambda g: g[0])
    return groups


def default_k(sentence_count: int) -> int:
    return max(1, -(-sentence_count // 8))  # ceil(n / 8)
