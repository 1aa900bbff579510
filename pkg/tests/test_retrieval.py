import itertools
import math

import httpx
import numpy as np
import pytest

from inktrace.errors import (
    BadResponse,
    EmptyCorpus,
    EmptyIndex,
    InvalidK,
    InvalidParams,
    LengthMismatch,
    ProviderMismatch,
)
from inktrace.retrieval import (
    HashingEmbedder,
    HttpEmbedder,
    assemble_prompt,
    build_index,
    chunk_char,
    chunk_kmeans,
    chunk_recursive,
    chunk_semantic,
    clean_sentence,
    evaluate_chunking,
    kmeans_cluster,
    load_index,
    preprocess,
    retrieve,
    save_index,
    stem,
)
from inktrace.stroke_log import QuestionnaireResponse, QUESTIONS


# --- preprocessing ---------------------------------------------------------------

def test_preprocess_stopwords_and_stemming():
    assert preprocess("The Trees were DRAWN…") == "tree drawn"


def test_preprocess_plain_text_lowercased_only():
    assert clean_sentence("Vivid chalk") == "vivid chalk"


def test_preprocess_stopword_only_text_empty():
    assert preprocess("The of and is.") == ""


def test_preprocess_preserves_sentence_boundaries():
    out = preprocess("Tall houses stand firm. Short fences lean sideways.")
    assert out == "tall house stand firm. short fence lean sideway"


def test_stemmer_rules():
    assert stem("trees") == "tree"
    assert stem("houses") == "house"
    assert stem("lines") == "line"
    assert stem("pass") == "pass"
    assert stem("radius") == "radius"
    assert stem("bodies") == "body"
    assert stem("drawn") == "drawn"


def test_headings_extracted_to_section_path():
    from inktrace.retrieval import prepare_document
    sections = prepare_document("# Top\nAlpha bravo.\n## Inner\nCharlie delta.")
    assert sections[0].section_path == ("Top",)
    assert sections[1].section_path == ("Top", "Inner")


# --- char chunking ---------------------------------------------------------------

def test_chunk_char_no_overlap():
    text = "x" * 1000
    chunks = chunk_char(text, 300, 0)
    assert [len(c) for c in chunks] == [300, 300, 300, 100]
    assert "".join(chunks) == text


def test_chunk_char_with_overlap_starts():
    text = "".join(chr(ord("a") + i % 26) for i in range(700))
    chunks = chunk_char(text, 300, 100)
    assert chunks[0] == text[0:300]
    assert chunks[1] == text[200:500]
    assert chunks[2] == text[400:700]
    # reassembly: first chunk plus the tail of each subsequent chunk
    rebuilt = chunks[0] + "".join(c[100:] for c in chunks[1:])
    assert rebuilt == text


def test_chunk_char_short_text_single_chunk():
    assert chunk_char("tiny", 300, 0) == ["tiny"]


def test_chunk_char_invalid_params():
    with pytest.raises(InvalidParams):
        chunk_char("abc", 10, 10)
    with pytest.raises(InvalidParams):
        chunk_char("abc", 0, 0)


# --- recursive chunking ----------------------------------------------------------

def test_chunk_recursive_paragraph_boundary():
    text = "alpha " * 20 + "\n\n" + "bravo " * 20
    chunks = chunk_recursive(text, 200)
    assert len(chunks) == 2
    assert chunks[0].endswith("\n\n")
    assert "".join(chunks) == text


def test_chunk_recursive_character_fallback():
    text = "y" * 500  # no separators at all
    chunks = chunk_recursive(text, 120)
    assert all(len(c) <= 120 for c in chunks)
    assert "".join(chunks) == text


def test_chunk_recursive_mixed_reassembly():
    text = ("First sentence here. Second one follows. " * 6 + "\n\n"
            + "Another paragraph with words. " * 8 + "\n\n"
            + "zzzz" * 90)
    chunks = chunk_recursive(text, 150)
    assert all(len(c) <= 150 for c in chunks)
    assert "".join(chunks) == text


# --- semantic chunking -----------------------------------------------------------

def _unit(v):
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v)


def test_semantic_identical_embeddings_single_chunk():
    emb = np.tile(_unit([1, 1, 0]), (5, 1))
    groups = chunk_semantic(["s"] * 5, emb, 0.5)
    assert groups == [[0, 1, 2, 3, 4]]


def test_semantic_orthogonal_groups_split():
    a = _unit([1, 0, 0])
    b = _unit([0, 1, 0])
    emb = np.vstack([a, a, a, b, b])
    groups = chunk_semantic(["s"] * 5, emb, 0.5)
    assert groups == [[0, 1, 2], [3, 4]]


def test_semantic_matches_greedy_oracle_three_topics():
    rng = np.random.default_rng(77)
    topics = [_unit([1, 0, 0, 0]), _unit([0, 1, 0, 0]), _unit([0, 0, 1, 0])]
    emb = []
    for topic in topics:
        for _ in range(4):
            emb.append(_unit(topic + rng.normal(0, 0.05, 4)))
    emb = np.vstack(emb)
    threshold = 0.8
    got = chunk_semantic(["s"] * 12, emb, threshold)

    # independent re-run of the greedy rule, scalar style
    oracle = [[0]]
    for i in range(1, 12):
        members = oracle[-1]
        mean = emb[members].sum(axis=0) / len(members)
        cos = float(mean @ emb[i] / (np.linalg.norm(mean) * np.linalg.norm(emb[i])))
        if cos >= threshold:
            members.append(i)
        else:
            oracle.append([i])
    assert got == oracle
    assert got == [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]


def test_semantic_length_mismatch():
    with pytest.raises(LengthMismatch):
        chunk_semantic(["a", "b"], np.eye(3), 0.5)


# --- k-means chunking ------------------------------------------------------------

def test_kmeans_k1_single_chunk():
    emb = np.eye(4)
    assert chunk_kmeans(["a", "b", "c", "d"], emb, 1) == [[0, 1, 2, 3]]


def test_kmeans_k_equals_n_singletons():
    emb = np.eye(5)
    groups = chunk_kmeans(["a", "b", "c", "d", "e"], emb, 5)
    assert groups == [[0], [1], [2], [3], [4]]


def test_kmeans_invalid_k():
    with pytest.raises(InvalidK):
        chunk_kmeans(["a"], np.eye(1), 2)
    with pytest.raises(InvalidK):
        chunk_kmeans(["a"], np.eye(1), 0)


def test_kmeans_two_clouds_match_enumeration_oracle():
    rng = np.random.default_rng(5)
    cloud_a = rng.normal(loc=(0, 0), scale=0.1, size=(5, 2))
    cloud_b = rng.normal(loc=(5, 5), scale=0.1, size=(5, 2))
    points = np.vstack([cloud_a, cloud_b])
    groups = chunk_kmeans([str(i) for i in range(10)], points, 2, seed=3)

    # oracle: enumerate all 2-partitions, minimize within-cluster SSE
    best, best_sse = None, math.inf
    indexes = list(range(10))
    for size in range(1, 10):
        for combo in itertools.combinations(indexes, size):
            left = list(combo)
            right = [i for i in indexes if i not in combo]
            sse = 0.0
            for side in (left, right):
                pts = points[side]
                sse += float(((pts - pts.mean(axis=0)) ** 2).sum())
            if sse < best_sse - 1e-12:
                best_sse, best = sse, (sorted(left), sorted(right))
    got = tuple(sorted(tuple(sorted(g)) for g in groups))
    want = tuple(sorted((tuple(best[0]), tuple(best[1]))))
    assert got == want


def test_kmeans_deterministic_across_runs():
    rng = np.random.default_rng(11)
    points = rng.normal(size=(30, 6))
    first = kmeans_cluster(points, 4, seed=9).tolist()
    for _ in range(9):
        assert kmeans_cluster(points, 4, seed=9).tolist() == first


# --- embedders -------------------------------------------------------------------

def test_hashing_embedder_deterministic_and_unit_norm():
    embedder = HashingEmbedder(dim=64)
    a = embedder.embed(["tall house by the hill", "tall house by the hill"])
    assert np.array_equal(a[0], a[1])
    assert np.linalg.norm(a[0]) == pytest.approx(1.0, abs=1e-6)
    b = embedder.embed(["totally different words entirely"])
    assert np.linalg.norm(b[0]) == pytest.approx(1.0, abs=1e-6)


def test_http_embedder_normalizes_and_errors():
    def ok(request):
        return httpx.Response(200, json={
            "provider_id": "mock-1",
            "embeddings": [[3.0, 4.0], [0.0, 2.0]],
        })

    embedder = HttpEmbedder("http://embed.test/v1",
                            client=httpx.Client(transport=httpx.MockTransport(ok)))
    vectors = embedder.embed(["a", "b"])
    assert vectors[0] == pytest.approx([0.6, 0.8])
    assert embedder.provider_id == "mock-1"

    def ragged(request):
        return httpx.Response(200, json={"embeddings": [[1, 2], [1, 2, 3]]})

    bad = HttpEmbedder("http://embed.test/v1",
                       client=httpx.Client(transport=httpx.MockTransport(ragged)))
    from inktrace.errors import DimensionMismatch
    with pytest.raises(DimensionMismatch):
        bad.embed(["a", "b"])

    def boom(request):
        return httpx.Response(503, text="overloaded")

    with pytest.raises(BadResponse):
        HttpEmbedder("http://embed.test/v1",
                     client=httpx.Client(transport=httpx.MockTransport(boom))
                     ).embed(["a"])


def test_cosine_identities_random_vectors():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = _unit(rng.normal(size=8))
        b = _unit(rng.normal(size=8))
        assert float(a @ a) == pytest.approx(1.0, abs=1e-9)
        assert float(a @ -a) == pytest.approx(-1.0, abs=1e-9)
        assert float(a @ b) == pytest.approx(float(b @ a), abs=1e-12)
        assert -1.0 - 1e-9 <= float(a @ b) <= 1.0 + 1e-9


# --- index build / retrieve -------------------------------------------------------

def _index(corpus_docs, strategy="recursive", **kwargs):
    return build_index(corpus_docs, strategy, HashingEmbedder(dim=64), **kwargs)


def test_build_index_and_self_query(corpus_docs):
    index = _index(corpus_docs)
    embedder = HashingEmbedder(dim=64)
    chunk = index.chunks[3]
    hits = retrieve(index, chunk.text, embedder, top_k=1)
    assert hits[0][0].id == chunk.id
    assert hits[0][1] == pytest.approx(1.0, abs=1e-6)


def test_retrieve_matches_full_scan_oracle(corpus_docs):
    index = _index(corpus_docs, strategy="char", chunk_size=120)
    embedder = HashingEmbedder(dim=64)
    rng = np.random.default_rng(8)
    vocabulary = ("house tree person door window crown trunk line drawing "
                  "pressure energy mood corner security family hill").split()
    for _ in range(25):
        query = " ".join(rng.choice(vocabulary, size=6))
        got = retrieve(index, query, embedder, top_k=5)
        qv = embedder.embed([query])[0]
        scored = sorted(((float(c.embedding @ qv), c) for c in index.chunks),
                        key=lambda pair: (-pair[0], pair[1].id))
        want = [(c.id, s) for s, c in scored[:5]]
        assert [(c.id, round(s, 12)) for c, s in got] == \
               [(cid, round(s, 12)) for cid, s in want]


def test_retrieve_empty_index_and_provider_mismatch(corpus_docs):
    index = _index(corpus_docs)
    with pytest.raises(ProviderMismatch):
        retrieve(index, "query", HashingEmbedder(dim=32))
    from inktrace.retrieval.index import ChunkIndex
    empty = ChunkIndex(chunks=(), provider_id="x", strategy="char", built_at=0.0)
    with pytest.raises(EmptyIndex):
        retrieve(empty, "query", HashingEmbedder(dim=64))


def test_empty_corpus_rejected():
    with pytest.raises(EmptyCorpus):
        build_index([("empty.md", "The of and.")], "char", HashingEmbedder())


def test_index_save_load_round_trip(tmp_path, corpus_docs):
    index = _index(corpus_docs, strategy="semantic")
    path = tmp_path / "corpus.cidx"
    save_index(index, path)
    loaded = load_index(path)
    assert loaded.provider_id == index.provider_id
    assert loaded.strategy == index.strategy
    assert len(loaded.chunks) == len(index.chunks)
    for a, b in zip(loaded.chunks, index.chunks):
        assert a == b


def test_kmeans_index_deterministic(corpus_docs):
    first = _index(corpus_docs, strategy="kmeans", k=3)
    for _ in range(3):
        again = _index(corpus_docs, strategy="kmeans", k=3)
        assert [c.text for c in again.chunks] == [c.text for c in first.chunks]


# --- evaluation ------------------------------------------------------------------

def test_evaluate_chunking_perfect_alignment():
    embedder = HashingEmbedder(dim=64)
    # preprocessing-stable wording: no stopwords, nothing to stem
    passages = [
        "heavy line pressure signal tension",
        "missing door signal guarded contact",
        "dead tree signal hopeless exhaustion",
    ]
    doc = ("# guide\n" + ". ".join(passages) + ".")
    index = build_index([("guide.md", doc)], "semantic", embedder,
                        semantic_threshold=0.99)
    assert sorted(c.text for c in index.chunks) == sorted(passages)
    queries = [(p, p) for p in passages]
    scores = evaluate_chunking({"semantic": index}, queries, embedder)
    # chunks equal the ground-truth passages (threshold splits everything)
    assert scores["semantic"] == pytest.approx(1.0, abs=1e-6)


def test_semantic_beats_character_on_aligned_corpus():
    embedder = HashingEmbedder(dim=64)
    passages = [
        "alpha omega theta kappa sigma delta",
        "red green blue yellow purple orange",
        "house window door roof chimney wall",
        "running jumping walking crawling sprinting leaping",
    ]
    doc = "# corpus\n" + ". ".join(passages) + "."
    semantic = build_index([("c.md", doc)], "semantic", embedder,
                           semantic_threshold=0.6)
    # character chunks sized to bisect every passage
    char = build_index([("c.md", doc)], "char", embedder, chunk_size=19)
    queries = [(p, p) for p in passages]
    scores = evaluate_chunking({"semantic": semantic, "char": char}, queries,
                               embedder)
    assert scores["semantic"] >= scores["char"]


# --- prompt assembly -------------------------------------------------------------

def test_prompt_zero_chunks_abstention():
    prompt = assemble_prompt("## house\nhouse: omitted\n", [])
    assert "No reference passages are available" in prompt
    assert "do not make symbolic or psychological claims" in prompt


def test_prompt_includes_each_chunk_once_with_citation(corpus_docs):
    index = _index(corpus_docs)
    embedder = HashingEmbedder(dim=64)
    hits = retrieve(index, "missing door and faint lines", embedder, top_k=3)
    prompt = assemble_prompt("## house\nhouse: present\n", hits)
    for i, (chunk, _score) in enumerate(hits, start=1):
        assert prompt.count(chunk.text) == 1
        assert f"[{i}] ({chunk.source_doc}:" in prompt
    assert prompt.count("# Reference passages") == 1


def test_prompt_with_questionnaire_and_determinism(corpus_docs):
    q = QuestionnaireResponse(age=30, gender="other",
                              answers=((QUESTIONS[0], "A wizard."),))
    index = _index(corpus_docs)
    hits = retrieve(index, "house", HashingEmbedder(dim=64), top_k=2)
    a = assemble_prompt("desc", hits, q)
    b = assemble_prompt("desc", hits, q)
    assert a == b
    assert "Q: Who do you imagine lives in this house?" in a
    assert "A: A wizard." in a


def test_sentence_multiset_preserved_by_semantic_and_kmeans(corpus_docs):
    from inktrace.retrieval import prepare_document

    embedder = HashingEmbedder(dim=64)
    want = sorted(
        sentence
        for _, raw in corpus_docs
        for section in prepare_document(raw)
        for sentence in section.sentences)
    for strategy in ("semantic", "kmeans"):
        index = build_index(corpus_docs, strategy, embedder, k=2)
        got = sorted(
            sentence
            for chunk in index.chunks
            for sentence in chunk.text.split(". "))
        assert got == want, strategy
