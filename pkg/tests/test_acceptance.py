"""Acceptance suite: every criterion at its stated tolerance.

Each test is one criterion; conftest prints an ACCEPTANCE PASS/FAIL line
per test. The whole suite runs offline (hashing fallback embedder, no
endpoints configured) and independently of the capture UI.
"""

import json
import math
import os
import shutil
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from inktrace.annotations import indicator_rules, map_indicators
from inktrace.kinematics import (
    SpeedProfile,
    sparc,
    sparc_spectrum,
    stroke_length,
    stroke_speed,
)
from inktrace.renderer import reconstruct
from inktrace.retrieval import (
    HashingEmbedder,
    build_index,
    chunk_char,
    chunk_kmeans,
    chunk_recursive,
    evaluate_chunking,
    kmeans_cluster,
    retrieve,
)
from inktrace.retrieval.index import ChunkIndex, KnowledgeChunk
from inktrace.spatial import classify_ratio, placement_grid
from inktrace.stroke_log import parse_session

from conftest import build_session, golden_actions, make_action

pytestmark = pytest.mark.acceptance


# --- stroke length and speed ----------------------------------------------------

def test_acceptance_stroke_length_and_speed():
    start = time.monotonic()
    rng = np.random.default_rng(2024)
    for i in range(500):
        n = int(rng.integers(2, 60))
        pts = rng.uniform(0, 1000, size=(n, 2))
        t0 = 1_000_000
        t1 = t0 + int(rng.integers(50, 8000))
        ts = np.linspace(t0, t1, n).round().astype(int)
        session = build_session(make_action(
            points=[(x, y, t) for (x, y), t in zip(pts, ts)]))
        # independent per-segment oracle
        oracle_length = 0.0
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            oracle_length += math.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
        got_length = stroke_length(session.actions[0].points)
        assert got_length == pytest.approx(oracle_length, rel=1e-9)
        got = stroke_speed(session.actions[0])
        assert got.speed_px_per_s == pytest.approx(
            oracle_length / ((t1 - t0) / 1000.0), rel=1e-9)
    # the exact pinned case: (0,0) -> (3,4) over one second
    pinned = build_session(make_action(points=((0, 0, 1000), (3, 4, 2000))))
    assert stroke_speed(pinned.actions[0]).speed_px_per_s == 5.0
    assert time.monotonic() - start < 1.0


# --- spectral arc length smoothness ----------------------------------------------

def _profile(speeds, hz=100.0):
    speeds = np.asarray(speeds, dtype=np.float64)
    return SpeedProfile(times=np.arange(speeds.size) / hz, speeds=speeds, hz=hz)


def test_acceptance_sparc_oracle_and_invariances():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(8, 400))
        t = np.arange(n) / 100.0
        v = (np.abs(rng.normal(2.0, 1.0, n))
             + rng.uniform(0, 3) * np.exp(-((t - t.mean()) ** 2)))
        profile = _profile(v)
        freqs, vhat, _ = sparc_spectrum(profile)
        # second, independent trapezoid-rule integration over the spectrum
        wc = freqs[-1]
        oracle = 0.0
        for i in range(len(freqs) - 1):
            slope = (vhat[i + 1] - vhat[i]) / (freqs[i + 1] - freqs[i])
            integrand = math.sqrt((1.0 / wc) ** 2 + slope * slope)
            xs = np.linspace(freqs[i], freqs[i + 1], 9)
            oracle += float(np.trapezoid(np.full(9, integrand), xs))
        assert sparc(profile) == pytest.approx(-oracle, abs=1e-6)

    base = _profile(np.abs(np.random.default_rng(5).normal(2, 1, 200)))
    sal = sparc(base)
    for k in (0.5, 2, 10):
        assert abs(sal - sparc(base.scaled(k))) < 1e-9

    t = np.arange(0, 2.0, 0.01)
    bell = np.exp(-5 * (t - 1.0) ** 2)
    sal_smooth = sparc(_profile(bell))
    for i in range(50):
        rng = np.random.default_rng(1000 + i)
        freq = rng.uniform(4.0, 15.0)
        phase = rng.uniform(0, 2 * np.pi)
        amp = rng.uniform(0.15, 0.3)
        noisy = bell * (1.0 + amp * np.sin(2 * np.pi * freq * t + phase))
        assert sparc(_profile(noisy)) < sal_smooth, f"draw {i}"


# --- placement grid --------------------------------------------------------------

def test_acceptance_placement_grid():
    w, h = 800, 600
    rng = np.random.default_rng(31)
    points = rng.uniform(0, [w, h], size=(1000, 2))
    grid = placement_grid(points, (w, h))
    assert abs(grid.probabilities.sum() - 1.0) <= 1e-9
    counts = [[0] * 3 for _ in range(3)]
    for x, y in points:
        col = min(max(int((x * 3.0) // w), 0), 2)
        row = min(max(int((y * 3.0) // h), 0), 2)
        counts[row][col] += 1
    assert grid.counts.tolist() == counts

    centers = [((2 * j + 1) * w / 6.0, (2 * i + 1) * h / 6.0)
               for i in range(3) for j in range(3)]
    nine = placement_grid(centers, (w, h))
    assert np.allclose(nine.probabilities, 1.0 / 9.0, atol=1e-12)


# --- size thresholds -------------------------------------------------------------

def test_acceptance_size_thresholds():
    ratios = [0.05, 1.0 / 9.0, 0.5, 2.0 / 3.0, 0.70]
    expected = ["tiny", "normal", "normal", "normal", "huge"]
    assert [classify_ratio(r) for r in ratios] == expected


# --- indicator rule engine -------------------------------------------------------

def test_acceptance_indicator_rules():
    assert map_indicators({"leaning_house"})[0].meaning == \
        "Psychological conflict and sense of unreality"
    assert map_indicators({"smoking_chimney"})[0].meaning == \
        "Nervousness, sensitivity, and irritability"

    # every meaning is reachable, firing first
    reachability = {
        1: {"poker_face"}, 2: {"leaning_house"}, 3: {"smoking_chimney"},
        4: {"single_line_limbs"}, 5: {"placement:upper_left", "color:brown"},
        6: {"placement:central"}, 7: {"color:white", "very_faint_lines"},
        8: {"color:brown", "placement:top_edge", "size:small"},
        9: {"thick_lines"}, 10: {"color:green", "very_faint_lines"},
        11: {"placement:bottom_edge"}, 12: {"placement:side_edge"},
        13: {"color:red"},
    }
    rules = indicator_rules()
    assert len(rules) == 13
    for row, predicates in reachability.items():
        top = map_indicators(predicates)[0]
        assert top.rule_index == row and top.meaning == rules[row - 1].meaning

    # monotone over 1000 random predicate supersets
    vocabulary = sorted({f for rule in rules for f in rule.features})
    rng = np.random.default_rng(99)
    for _ in range(1000):
        base = set(rng.choice(vocabulary,
                              size=rng.integers(0, 6), replace=False))
        extra = set(rng.choice(vocabulary,
                               size=rng.integers(1, 6), replace=False))
        fired = {m.meaning for m in map_indicators(base)}
        fired_more = {m.meaning for m in map_indicators(base | extra)}
        assert fired <= fired_more


# --- renderer -------------------------------------------------------------------

def test_acceptance_renderer():
    # stroke plus identical-geometry erase restores an all-white canvas
    draw_pts = ((12, 8, 1000), (52, 24, 1400), (30, 34, 1800))
    erase_pts = ((12, 8, 2000), (52, 24, 2400), (30, 34, 2800))
    pair = build_session(
        make_action(order=1, line_width=7, color="#7733AA", points=draw_pts),
        make_action(order=2, action_type="erase", line_width=7,
                    points=erase_pts),
        canvas=(64, 48))
    assert (reconstruct(pair)[:, :, :3] == 255).all()

    # golden reconstruction is bit-identical across runs
    golden = parse_session(json.dumps(golden_actions()).encode(), (800, 600))
    first = reconstruct(golden)
    second = reconstruct(golden)
    assert first.tobytes() == second.tobytes()

    # replaying the full prefix equals the full render
    last_end = golden.actions[-1].timestamp_end
    assert np.array_equal(reconstruct(golden, at_ms=last_end), first)


# --- retrieval -------------------------------------------------------------------

class StaticEmbedder:
    """Maps query ids to preset unit vectors (provider-compatible)."""

    def __init__(self, table, provider_id):
        self.table = table
        self.provider_id = provider_id

    def embed(self, texts):
        return np.stack([self.table[t] for t in texts])


def test_acceptance_retrieval_topk_and_ordering(corpus_docs):
    rng = np.random.default_rng(7)
    dim = 32
    vectors = rng.normal(size=(200, dim))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    chunks = tuple(
        KnowledgeChunk(id=f"c{i:03d}", text=f"chunk {i}", source_doc="synthetic",
                       section_path=("synthetic",), strategy="char",
                       embedding=vectors[i])
        for i in range(200))
    index = ChunkIndex(chunks=chunks, provider_id="static-1", strategy="char",
                       built_at=0.0)

    queries = {}
    for qi in range(100):
        qv = rng.normal(size=dim)
        queries[f"q{qi:03d}"] = qv / np.linalg.norm(qv)
    embedder = StaticEmbedder(queries, "static-1")

    for query_id, qv in queries.items():
        got = retrieve(index, query_id, embedder, top_k=10)
        # independent full-scan oracle: repeated max selection
        remaining = {c.id: float(c.embedding @ qv) for c in chunks}
        want = []
        for _ in range(10):
            best = max(remaining.items(), key=lambda kv: (kv[1], ),
                       default=None)
            best_score = max(remaining.values())
            best_id = min(cid for cid, s in remaining.items()
                          if s == best_score)
            want.append((best_id, remaining.pop(best_id)))
        assert [(c.id, s) for c, s in got] == want

    # self-query scores 1.0
    fallback = HashingEmbedder(dim=64)
    corpus_index = build_index(corpus_docs, "recursive", fallback)
    probe = corpus_index.chunks[0]
    top = retrieve(corpus_index, probe.text, fallback, top_k=1)[0]
    assert top[0].id == probe.id
    assert top[1] == pytest.approx(1.0, abs=1e-6)

    # constructed alignment corpus: semantic >= character (Table ordering)
    passages = [
        "alpha omega theta kappa sigma delta",
        "red green blue yellow purple orange",
        "house window door roof chimney wall",
        "running jumping walking crawling sprinting leaping",
    ]
    doc = "# corpus\n" + ". ".join(passages) + "."
    semantic = build_index([("c.md", doc)], "semantic", fallback,
                           semantic_threshold=0.6)
    char = build_index([("c.md", doc)], "char", fallback, chunk_size=19)
    scores = evaluate_chunking({"semantic": semantic, "char": char},
                               [(p, p) for p in passages], fallback)
    assert scores["semantic"] >= scores["char"]


# --- chunking -------------------------------------------------------------------

def test_acceptance_chunking():
    text = ("Every stroke tells part of a story. Pauses mark thought. " * 8
            + "\n\n" + "Color choice shifts with mood and context. " * 6)
    for chunks in (chunk_char(text, 120, 0), chunk_recursive(text, 120)):
        assert all(len(c) <= 120 for c in chunks)
        assert "".join(chunks) == text
    with_overlap = chunk_char(text, 120, 40)
    rebuilt = with_overlap[0] + "".join(c[40:] for c in with_overlap[1:])
    assert rebuilt == text

    rng = np.random.default_rng(13)
    points = rng.normal(size=(40, 8))
    first = kmeans_cluster(points, 5, seed=21).tolist()
    for _ in range(10):
        assert kmeans_cluster(points, 5, seed=21).tolist() == first

    emb = np.eye(6)
    names = list("abcdef")
    assert chunk_kmeans(names, emb, 1) == [[0, 1, 2, 3, 4, 5]]
    assert chunk_kmeans(names, emb, 6) == [[0], [1], [2], [3], [4], [5]]


# --- end-to-end report ----------------------------------------------------------

def _strip_created_at(manifest_path: Path) -> dict:
    manifest = json.loads(manifest_path.read_text())
    manifest.pop("created_at", None)
    return manifest


def _dir_fingerprint(records_root: Path) -> dict:
    out = {}
    for record in sorted(records_root.iterdir()):
        blobs = {p.name: p.read_bytes() for p in (record / "blobs").iterdir()}
        out[record.name] = (_strip_created_at(record / "manifest.json"), blobs)
    return out


def test_acceptance_report_byte_deterministic(tmp_path, golden_session_bytes,
                                              golden_annotations_bytes,
                                              golden_final_png,
                                              golden_questionnaire_bytes,
                                              corpus_docs):
    workdir = tmp_path
    (workdir / "session.json").write_bytes(golden_session_bytes)
    (workdir / "annotations.json").write_bytes(golden_annotations_bytes)
    (workdir / "final.png").write_bytes(golden_final_png)
    (workdir / "questionnaire.json").write_bytes(golden_questionnaire_bytes)
    corpus = workdir / "corpus"
    corpus.mkdir()
    for name, text in corpus_docs:
        (corpus / name).write_text(text, encoding="utf-8")

    env = {k: v for k, v in os.environ.items()
           if not k.startswith("INKTRACE_")}
    env["INKTRACE_NO_NUMBA"] = "1"  # steady-state path, no JIT warmup cost

    def run(args, cwd):
        proc = subprocess.run([sys.executable, "-m", "inktrace.cli", *args],
                              cwd=cwd, env=env, capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr + proc.stdout
        return proc

    run(["index", "build", "corpus", "--strategy", "semantic",
         "-o", "corpus.cidx"], workdir)

    report_args = ["report", "session.json",
                   "--annotations", "annotations.json",
                   "--final-image", "final.png",
                   "--questionnaire", "questionnaire.json",
                   "--index", "corpus.cidx"]
    run([*report_args, "--out", "records_a"], workdir)
    start = time.monotonic()
    run([*report_args, "--out", "records_b"], workdir)
    elapsed = time.monotonic() - start
    assert elapsed < 5.0, f"report took {elapsed:.2f}s"

    finger_a = _dir_fingerprint(workdir / "records_a")
    finger_b = _dir_fingerprint(workdir / "records_b")
    assert finger_a == finger_b

    # all stages ran (no network, fallback embedder, no secondary involved)
    (record_id, (manifest, _)) = next(iter(finger_a.items()))
    assert manifest["stages"]["retrieve"] == "ok"
    assert manifest["stages"]["fidelity"] == "ok"
    assert manifest["stages"]["llm"].startswith("skipped")
    shutil.rmtree(workdir / "records_a")
    shutil.rmtree(workdir / "records_b")
