"""Chunk index: build, persist, retrieve, and strategy evaluation.

The on-disk format is a single versioned file: magic ``CIDX1``, a
length-prefixed JSON header (provider_id, dim, strategy, count, built_at),
then one length-prefixed JSON record per chunk. Retrieval is an exact
full scan (the corpus is book-scale; no ANN structure needed).
"""

from __future__ import annotations

import json
import struct
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import EmptyCorpus, EmptyIndex, MalformedJson, ProviderMismatch
from . import chunking
from .embedding import Embedder
from .preprocess import prepare_document

_MAGIC = b"CIDX1"


@dataclass(frozen=True)
class KnowledgeChunk:
    id: str
    text: str
    source_doc: str
    section_path: tuple[str, ...]
    strategy: str
    embedding: np.ndarray  # unit norm

    def __eq__(self, other):  # ndarray needs explicit handling
        return (isinstance(other, KnowledgeChunk)
                and self.id == other.id and self.text == other.text
                and self.source_doc == other.source_doc
                and self.section_path == other.section_path
                and self.strategy == other.strategy
                and np.array_equal(self.embedding, other.embedding))


@dataclass(frozen=True)
class ChunkIndex:
    chunks: tuple[KnowledgeChunk, ...]
    provider_id: str
    strategy: str
    built_at: float

    @property
    def dim(self) -> int:
        return int(self.chunks[0].embedding.size) if self.chunks else 0

    def matrix(self) -> np.ndarray:
        return np.stack([c.embedding for c in self.chunks])


def _segments(documents: Sequence[tuple[str, str]], strategy: str,
              chunk_size: int, chunk_overlap: int,
              semantic_threshold: float, k: int | None,
              seed: int, embedder: Embedder):
    """Yield (text, source_doc, section_path, sentence_embedding_or_None)."""
    for name, raw in documents:
        sections = prepare_document(raw)
        if strategy in ("char", "recursive"):
            for section in sections:
                text = ". ".join(section.sentences)
                if strategy == "char":
                    pieces = chunking.chunk_char(text, chunk_size, chunk_overlap)
                else:
                    pieces = chunking.chunk_recursive(text, chunk_size)
                for piece in pieces:
                    yield piece, name, section.section_path
        else:
            for section in sections:
                sentences = list(section.sentences)
                if not sentences:
                    continue
                emb = embedder.embed(sentences)
                if strategy == "semantic":
                    groups = chunking.chunk_semantic(sentences, emb,
                                                     semantic_threshold)
                else:
                    kk = k if k is not None else chunking.default_k(len(sentences))
                    kk = min(kk, len(sentences))
                    groups = chunking.chunk_kmeans(sentences, emb, kk, seed=seed)
                for group in groups:
                    yield (". ".join(sentences[i] for i in group),
                           name, section.section_path)


def build_index(documents: Sequence[tuple[str, str]], strategy: str,
                embedder: Embedder, chunk_size: int = 400,
                chunk_overlap: int = 0, semantic_threshold: float = 0.75,
                k: int | None = None, seed: int = 0) -> ChunkIndex:
    """Preprocess, chunk and embed a corpus of (name, raw_text) documents."""
    if strategy not in chunking.STRATEGIES:
        raise MalformedJson(f"unknown strategy {strategy!r}")
    specs = list(_segments(documents, strategy, chunk_size, chunk_overlap,
                           semantic_threshold, k, seed, embedder))
    specs = [s for s in specs if s[0].strip()]
    if not specs:
        raise EmptyCorpus("no non-empty chunks after preprocessing")
    vectors = embedder.embed([text for text, _, _ in specs])
    chunks = tuple(
        KnowledgeChunk(id=f"{source}#{i:05d}", text=text, source_doc=source,
                       section_path=tuple(path), strategy=strategy,
                       embedding=vectors[i])
        for i, (text, source, path) in enumerate(specs))
    return ChunkIndex(chunks=chunks, provider_id=embedder.provider_id,
                      strategy=strategy, built_at=time.time())


def save_index(index: ChunkIndex, path) -> None:
    header = json.dumps({
        "provider_id": index.provider_id,
        "dim": index.dim,
        "strategy": index.strategy,
        "count": len(index.chunks),
        "built_at": index.built_at,
    }).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack(">I", len(header)))
        fh.write(header)
        for chunk in index.chunks:
            record = json.dumps({
                "id": chunk.id,
                "text": chunk.text,
                "source_doc": chunk.source_doc,
                "section_path": list(chunk.section_path),
                "embedding": chunk.embedding.tolist(),
            }).encode("utf-8")
            fh.write(struct.pack(">I", len(record)))
            fh.write(record)


def load_index(path) -> ChunkIndex:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise MalformedJson(f"not a chunk index file: {path}")
        (hlen,) = struct.unpack(">I", fh.read(4))
        header = json.loads(fh.read(hlen))
        chunks = []
        for _ in range(header["count"]):
            (rlen,) = struct.unpack(">I", fh.read(4))
            rec = json.loads(fh.read(rlen))
            chunks.append(KnowledgeChunk(
                id=rec["id"], text=rec["text"], source_doc=rec["source_doc"],
                section_path=tuple(rec["section_path"]),
                strategy=header["strategy"],
                embedding=np.asarray(rec["embedding"], dtype=np.float64)))
    return ChunkIndex(chunks=tuple(chunks), provider_id=header["provider_id"],
                      strategy=header["strategy"], built_at=header["built_at"])


def retrieve(index: ChunkIndex, query_text: str, embedder: Embedder,
             top_k: int = 5) -> list[tuple[KnowledgeChunk, float]]:
    """Exact top-k by cosine similarity, descending, ties by chunk id."""
    if not index.chunks:
        raise EmptyIndex()
    if embedder.provider_id != index.provider_id:
        raise ProviderMismatch(f"index built with {index.provider_id!r}, "
                               f"query embedded with {embedder.provider_id!r}")
    query = embedder.embed([query_text])[0]  # embed() yields unit rows
    scores = [float(chunk.embedding @ query) for chunk in index.chunks]
    ranked = sorted(zip(index.chunks, scores),
                    key=lambda pair: (-pair[1], pair[0].id))
    return [(chunk, score) for chunk, score in ranked[:top_k]]


def evaluate_chunking(indexes: dict[str, ChunkIndex],
                      queries: Sequence[tuple[str, str]],
                      embedder: Embedder) -> dict[str, float]:
    """Mean cosine of each strategy's top hit against the annotated
    relevant passage, over (query, relevant_passage) pairs."""
    results: dict[str, float] = {}
    for strategy, index in indexes.items():
        truth = embedder.embed([passage for _, passage in queries])
        scores = []
        for (query, _), tvec in zip(queries, truth):
            top = retrieve(index, query, embedder, top_k=1)
            scores.append(float(top[0][0].embedding @ tvec))
        results[strategy] = sum(scores) / len(scores) if scores else 0.0
    return results
