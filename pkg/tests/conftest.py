"""Shared fixtures: session-log builders and the golden end-to-end fixture."""

from __future__ import annotations

import json

import numpy as np
import pytest

from inktrace.stroke_log import parse_session


def pytest_runtest_logreport(report):
    """One visible pass/fail line per acceptance criterion."""
    if report.when == "call" and "test_acceptance" in report.nodeid:
        word = "PASS" if report.passed else "FAIL"
        name = report.nodeid.split("::")[-1]
        print(f"\nACCEPTANCE {word}: {name}", flush=True)


def make_points(triples):
    """(x, y, t) triples -> point dicts."""
    return [{"x": float(x), "y": float(y), "pointerType": "mouse",
             "timestamp": int(t)} for x, y, t in triples]


def make_action(order=1, action_type="drawLine", color="#000000", opacity=1,
                line_width=5, t0=None, t1=None, points=((0, 0, 1000), (3, 4, 2000))):
    pts = make_points(points)
    t0 = pts[0]["timestamp"] if t0 is None else t0
    t1 = pts[-1]["timestamp"] if t1 is None else t1
    return {
        "order": order,
        "action_type": action_type,
        "color": color,
        "opacity": opacity,
        "line_width": line_width,
        "timestamp_start": t0,
        "timestamp_end": t1,
        "points": pts,
    }


def session_json(*actions) -> bytes:
    return json.dumps(list(actions)).encode("utf-8")


def build_session(*actions, canvas=(800, 600), **kwargs):
    return parse_session(session_json(*actions), canvas, **kwargs)


def line_points(x0, y0, x1, y1, t0, t1, n):
    """n points sampled uniformly along a segment and its time window."""
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    ts = np.linspace(t0, t1, n).round().astype(int)
    return list(zip(xs, ys, ts))


SAMPLE_LOG_ACTION = {
    "order": 1,
    "action_type": "drawLine",
    "color": "#000000",
    "opacity": 1,
    "line_width": 5,
    "timestamp_start": 1751293539626,
    "timestamp_end": 1751293540253,
    "points": [{
        "x": 333.95,
        "y": 102.76,
        "pointerType": "mouse",
        "timestamp": 1751293539626,
    }],
}


@pytest.fixture
def sample_session_bytes() -> bytes:
    return json.dumps([SAMPLE_LOG_ACTION]).encode("utf-8")


# --- golden end-to-end fixture ----------------------------------------------
# An 800x600 drawing with a house (door + window + roof), a tree (crown +
# trunk), a person (head), one erase touch-up on the house, and one bucket
# fill inside the house body. Timestamps are strictly ordered.

def golden_actions() -> list[dict]:
    actions = []
    t = 10_000

    def add(action_type, color, width, pts, opacity=1, gap=400, dur=600):
        nonlocal t
        n = len(pts)
        ts = np.linspace(t, t + dur, n).round().astype(int)
        triples = [(x, y, int(stamp)) for (x, y), stamp in zip(pts, ts)]
        actions.append(make_action(
            order=len(actions) + 1, action_type=action_type, color=color,
            opacity=opacity, line_width=width, points=triples))
        t += dur + gap

    def seg(x0, y0, x1, y1, n=12):
        return list(zip(np.linspace(x0, x1, n), np.linspace(y0, y1, n)))

    # house body, roof, door, window (left third-ish of the canvas)
    add("drawLine", "#000000", 4, seg(120, 300, 120, 460) + seg(120, 460, 320, 460)
        + seg(320, 460, 320, 300) + seg(320, 300, 120, 300))
    add("drawLine", "#8B4513", 5, seg(110, 300, 220, 210) + seg(220, 210, 330, 300))
    add("drawLine", "#000000", 3, seg(190, 460, 190, 390) + seg(190, 390, 240, 390)
        + seg(240, 390, 240, 460))
    add("drawLine", "#0000FF", 2, seg(150, 330, 180, 330) + seg(180, 330, 180, 360)
        + seg(180, 360, 150, 360) + seg(150, 360, 150, 330))
    # tree: trunk + crown (middle)
    add("drawLine", "#8B4513", 6, seg(430, 460, 430, 350))
    add("drawLine", "#008000", 7, [
        (430 + 45 * np.cos(a), 320 + 45 * np.sin(a))
        for a in np.linspace(0, 2 * np.pi, 24)
    ])
    # person: head + body (right)
    add("drawLine", "#000000", 3, [
        (640 + 18 * np.cos(a), 330 + 18 * np.sin(a))
        for a in np.linspace(0, 2 * np.pi, 16)
    ])
    add("drawLine", "#FF0000", 3, seg(640, 348, 640, 430))
    # erase a stray mark near the house, then fill the house body yellow
    add("erase", "#000000", 12, seg(250, 320, 290, 320))
    add("bucketFill", "#FFFF00", 1, [(220.0, 420.0)], opacity=1)
    return actions


GOLDEN_ANNOTATIONS = {
    "objects": [
        {"label": "house", "box": [105, 205, 335, 465], "confidence": 0.97,
         "parts": [
             {"label": "door", "box": [185, 385, 245, 462], "confidence": 0.93},
             {"label": "window", "box": [145, 325, 185, 365], "confidence": 0.95},
             {"label": "roof", "box": [108, 205, 332, 305], "confidence": 0.92},
         ]},
        {"label": "tree", "box": [380, 270, 480, 465], "confidence": 0.96,
         "parts": [
             {"label": "crown", "box": [382, 272, 478, 368], "confidence": 0.94},
             {"label": "trunk", "box": [420, 350, 440, 462], "confidence": 0.95},
         ]},
        {"label": "person", "box": [615, 308, 665, 435], "confidence": 0.91,
         "parts": [
             {"label": "head", "box": [620, 310, 660, 350], "confidence": 0.9},
         ]},
    ],
    "markers": {
        "leaning_house": {"value": False, "confidence": 0.88},
        "house_2d": {"value": True, "confidence": 0.8},
        "dead_tree": False,
        "poker_face": {"value": True, "confidence": 0.7},
    },
}

GOLDEN_QUESTIONNAIRE = {
    "age": 29,
    "gender": "female",
    "answers": [
        {"question": "Who do you imagine lives in this house?",
         "answer": "My grandparents."},
        {"question": "Is the tree alive or dead?", "answer": "Alive."},
        {"question": "What do you think this person feels?",
         "answer": "Calm, maybe a little bored."},
    ],
}


@pytest.fixture(scope="session")
def golden_session_bytes() -> bytes:
    return json.dumps(golden_actions()).encode("utf-8")


@pytest.fixture(scope="session")
def golden_annotations_bytes() -> bytes:
    return json.dumps(GOLDEN_ANNOTATIONS).encode("utf-8")


@pytest.fixture(scope="session")
def golden_questionnaire_bytes() -> bytes:
    return json.dumps(GOLDEN_QUESTIONNAIRE).encode("utf-8")


@pytest.fixture(scope="session")
def golden_final_png(golden_session_bytes) -> bytes:
    """A self-consistent final image: the session's own replay."""
    from inktrace.renderer import reconstruct, to_png_bytes
    session = parse_session(golden_session_bytes, (800, 600))
    return to_png_bytes(reconstruct(session))


CORPUS_DOCS = [
    ("drawing-size.md", """# Drawing size
Large drawings often accompany expansive mood and heightened energy.
A small drawing squeezed into a corner suggests withdrawal and low self-regard.

## Pressure and line weight
Heavy lines point to tension and assertion of the drawer.
Faint lines point to hesitancy, anxiety, or depleted energy.
"""),
    ("house-features.md", """# House
The house reflects the drawer's family life and sense of security.

## Door and windows
A missing door signals guardedness toward contact with other people.
Windows stand for the drawer's readiness to be seen by the world.

## Chimney
Smoke rising from the chimney hints at inner tension at home.
"""),
    ("tree-person.md", """# Tree
A dead tree is a strong sign of hopelessness and emotional exhaustion.
Roots exposed on the ground line show concern with stability and the past.

# Person
Missing facial features suggest avoidance of emotional contact.
Single line limbs often appear in constricted or immature figure drawings.
"""),
]


@pytest.fixture(scope="session")
def corpus_docs():
    return list(CORPUS_DOCS)
