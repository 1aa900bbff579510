import json

import pytest

from inktrace.errors import (
    DuplicateOrder,
    EmptyPoints,
    InvalidEnum,
    MalformedJson,
    MissingField,
)
from inktrace.stroke_log import (
    ActionType,
    QUESTIONS,
    parse_questionnaire,
    parse_session,
    serialize_session,
    validate_timing,
)

from conftest import SAMPLE_LOG_ACTION, build_session, make_action, session_json


def test_parse_documented_sample_record(sample_session_bytes):
    session = parse_session(sample_session_bytes, (800, 600))
    assert len(session.actions) == 1
    a = session.actions[0]
    assert a.order == 1
    assert a.action_type is ActionType.DRAW_LINE
    assert a.color == "#000000"
    assert a.opacity == 1.0
    assert a.line_width == 5.0
    assert a.timestamp_start == 1751293539626
    assert a.timestamp_end == 1751293540253
    assert len(a.points) == 1
    assert (a.points[0].x, a.points[0].y) == (333.95, 102.76)
    assert a.points[0].pointer_type == "mouse"


def test_parse_empty_array_is_valid():
    session = parse_session(b"[]", (800, 600))
    assert session.actions == ()


def test_duplicate_order_rejected():
    raw = session_json(make_action(order=1), make_action(order=1))
    with pytest.raises(DuplicateOrder):
        parse_session(raw, (800, 600))


def test_order_gap_rejected():
    raw = session_json(make_action(order=1), make_action(order=3))
    with pytest.raises(MalformedJson):
        parse_session(raw, (800, 600))


def test_actions_resorted_by_order():
    raw = session_json(make_action(order=2, points=((9, 9, 3000), (9, 9, 3500))),
                       make_action(order=1))
    session = parse_session(raw, (800, 600))
    assert [a.order for a in session.actions] == [1, 2]


@pytest.mark.parametrize("field", ["order", "action_type", "color", "opacity",
                                   "line_width", "timestamp_start",
                                   "timestamp_end", "points"])
def test_missing_field(field):
    action = make_action()
    del action[field]
    with pytest.raises(MissingField) as err:
        parse_session(session_json(action), (800, 600))
    assert err.value.field == field


def test_invalid_action_type():
    with pytest.raises(InvalidEnum):
        parse_session(session_json(make_action(action_type="spray")), (800, 600))


def test_empty_points_for_stroke():
    action = make_action()
    action["points"] = []
    with pytest.raises(EmptyPoints):
        parse_session(session_json(action), (800, 600))


def test_bucket_fill_needs_exactly_one_point():
    good = make_action(action_type="bucketFill", points=((5, 5, 1000),))
    parse_session(session_json(good), (800, 600))
    bad = make_action(action_type="bucketFill",
                      points=((5, 5, 1000), (6, 6, 1100)))
    with pytest.raises(MalformedJson):
        parse_session(session_json(bad), (800, 600))


@pytest.mark.parametrize("raw", [b"{", b"not json", b'{"an": "object"}'])
def test_malformed_json(raw):
    with pytest.raises(MalformedJson):
        parse_session(raw, (800, 600))


def test_unknown_fields_preserved_and_ignored():
    action = make_action()
    action["device"] = {"dpi": 96}
    session = parse_session(session_json(action), (800, 600))
    assert session.actions[0].extra == {"device": {"dpi": 96}}


def test_round_trip_identity():
    action = make_action(color="#AB12EF", opacity=0.5, line_width=2.5,
                         points=((0, 0, 1000), (10.25, 3.5, 1200), (11, 4, 1500)))
    action["note"] = "kept"
    session = parse_session(session_json(action, make_action(
        order=2, action_type="erase", points=((1, 1, 2000), (2, 2, 2100)))),
        (640, 480))
    again = parse_session(serialize_session(session), (640, 480))
    assert again == session


def test_round_trip_sample_record():
    session = parse_session(json.dumps([SAMPLE_LOG_ACTION]).encode(), (800, 600))
    assert parse_session(serialize_session(session), (800, 600)) == session


def test_validate_timing_clean():
    session = build_session(
        make_action(points=((0, 0, 1000), (1, 1, 1400), (2, 2, 2000))),
        make_action(order=2, points=((0, 0, 2500), (1, 1, 3000))))
    assert validate_timing(session) == []


def test_validate_timing_point_before_window():
    action = make_action(t0=1500, t1=2000,
                         points=((0, 0, 1400), (1, 1, 1800)))
    session = build_session(action)
    anomalies = validate_timing(session)
    assert [a.kind for a in anomalies] == ["point_out_of_window"]


def test_validate_timing_non_monotone_points():
    action = make_action(points=((0, 0, 1000), (1, 1, 1600), (2, 2, 1300),
                                 (3, 3, 2000)))
    session = build_session(action)
    kinds = [a.kind for a in validate_timing(session)]
    assert kinds == ["non_monotone_points"]


def test_validate_timing_overlap():
    # action 2 starts 10 ms before action 1 ends
    first = make_action(points=((0, 0, 1000), (5, 5, 2000)))
    second = make_action(order=2, points=((9, 9, 1990), (8, 8, 2400)))
    session = build_session(first, second)
    anomalies = validate_timing(session)
    assert [a.kind for a in anomalies] == ["overlapping_actions"]
    assert anomalies[0].action_order == 2
    assert "10 ms" in anomalies[0].detail


def test_questionnaire_parse_and_limits():
    q = parse_questionnaire(json.dumps({
        "age": 31, "gender": "male",
        "answers": [{"question": QUESTIONS[0], "answer": "Nobody."}],
    }))
    assert q.age == 31
    assert q.answers == ((QUESTIONS[0], "Nobody."),)
    with pytest.raises(MalformedJson):
        parse_questionnaire(json.dumps({
            "answers": [{"question": "Invented question?", "answer": "x"}]}))
    with pytest.raises(MalformedJson):
        parse_questionnaire(json.dumps({
            "answers": [{"question": QUESTIONS[0], "answer": "x"}] * 11}))


def test_non_finite_coordinates_rejected():
    action = make_action()
    action["points"][0]["x"] = float("nan")
    blob = json.dumps([action], allow_nan=True)
    with pytest.raises(MalformedJson):
        parse_session(blob.encode(), (800, 600))


from hypothesis import given, settings
from hypothesis import strategies as st


@st.composite
def valid_sessions(draw):
    n_actions = draw(st.integers(0, 5))
    actions = []
    t = 1000
    for i in range(n_actions):
        kind = draw(st.sampled_from(["drawLine", "erase", "bucketFill"]))
        n_points = 1 if kind == "bucketFill" else draw(st.integers(1, 6))
        points = []
        for _ in range(n_points):
            x = draw(st.floats(0, 800, allow_nan=False))
            y = draw(st.floats(0, 600, allow_nan=False))
            points.append((x, y, t))
            t += draw(st.integers(0, 50))
        action = make_action(
            order=i + 1, action_type=kind,
            color="#%06X" % draw(st.integers(0, 0xFFFFFF)),
            opacity=draw(st.sampled_from([0, 0.25, 0.5, 1])),
            line_width=draw(st.integers(1, 30)),
            points=points)
        if draw(st.booleans()):
            action["extra_field"] = draw(st.integers(0, 9))
        actions.append(action)
        t += draw(st.integers(0, 100))
    return session_json(*actions)


@given(valid_sessions())
@settings(max_examples=60, deadline=None)
def test_round_trip_property(raw):
    session = parse_session(raw, (800, 600))
    assert parse_session(serialize_session(session), (800, 600)) == session
