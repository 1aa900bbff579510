"""Knowledge-base preprocessing, chunking, indexing, retrieval, prompts."""

from .chunking import (
    DEFAULT_SEPARATORS,
    STRATEGIES,
    chunk_char,
    chunk_kmeans,
    chunk_recursive,
    chunk_semantic,
    default_k,
    kmeans_cluster,
)
from .embedding import Embedder, HashingEmbedder, HttpEmbedder, normalize_rows
from .index import (
    ChunkIndex,
    KnowledgeChunk,
    build_index,
    evaluate_chunking,
    load_index,
    retrieve,
    save_index,
)
from .preprocess import clean_sentence, prepare_document, preprocess, stem, stopwords
from .prompt import assemble_prompt

__all__ = [
    "DEFAULT_SEPARATORS", "STRATEGIES", "chunk_char", "chunk_kmeans",
    "chunk_recursive", "chunk_semantic", "default_k", "kmeans_cluster",
    "Embedder", "HashingEmbedder", "HttpEmbedder", "normalize_rows",
    "ChunkIndex", "KnowledgeChunk", "build_index", "evaluate_chunking",
    "load_index", "retrieve", "save_index",
    "clean_sentence", "prepare_document", "preprocess", "stem", "stopwords",
    "assemble_prompt",
]
