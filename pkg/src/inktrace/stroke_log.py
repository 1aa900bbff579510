"""Parsing, validation and serialization of drawing-session action logs.

The wire format is a JSON array of action objects::

    [{
        "order": 1,
        "action_type": "drawLine",
        "color": "#000000",
        "opacity": 1,
        "line_width": 5,
        "timestamp_start": 1751293539626,
        "timestamp_end": 1751293540253,
        "points": [{"x": 333.95, "y": 102.76,
                    "pointerType": "mouse", "timestamp": 1751293539626}]
    }, ...]

Canvas dimensions are not part of the log; they arrive out-of-band (CLI
flag, request field, or the final PNG's dimensions).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .errors import (
    DuplicateOrder,
    EmptyPoints,
    InvalidEnum,
    MalformedJson,
    MissingField,
)


class ActionType(enum.Enum):
    DRAW_LINE = "drawLine"
    ERASE = "erase"
    BUCKET_FILL = "bucketFill"


#: Action types that trace a path (draw and erase); bucket fills do not.
STROKE_TYPES = (ActionType.DRAW_LINE, ActionType.ERASE)

POINTER_TYPES = ("mouse", "pen", "touch")

#: Fixed questionnaire administered with a drawing session.
QUESTIONS = (
    "Who do you imagine lives in this house?",
    "What feelings does this house give you?",
    "How old do you think the tree is?",
    "Is the tree alive or dead?",
    "Which season of the year do you think it is?",
    "Does this image remind you of anyone?",
    "How old do you think this person is?",
    "What do you think this person does?",
    "What might this person be thinking?",
    "What do you think this person feels?",
)


@dataclass(frozen=True)
class PointSample:
    x: float
    y: float
    pointer_type: str
    timestamp: int  # epoch milliseconds


@dataclass(frozen=True)
class DrawAction:
    order: int
    action_type: ActionType
    color: str  # "#RRGGBB"
    opacity: float
    line_width: float
    timestamp_start: int
    timestamp_end: int
    points: tuple[PointSample, ...]
    extra: Mapping[str, Any] = field(default_factory=dict)

    @property
    def duration_s(self) -> float:
        return (self.timestamp_end - self.timestamp_start) / 1000.0

    @property
    def is_stroke(self) -> bool:
        return self.action_type in STROKE_TYPES


@dataclass(frozen=True)
class QuestionnaireResponse:
    age: int | None
    gender: str | None
    answers: tuple[tuple[str, str], ...]  # (question, answer), questions from QUESTIONS


@dataclass(frozen=True)
class DrawingSession:
    actions: tuple[DrawAction, ...]
    canvas_width: int
    canvas_height: int
    session_id: str = ""
    final_image: str | None = None  # opaque reference (path or artifact name)
    questionnaire: QuestionnaireResponse | None = None

    def strokes(self) -> tuple[DrawAction, ...]:
        return tuple(a for a in self.actions if a.is_stroke)


@dataclass(frozen=True)
class TimingAnomaly:
    kind: str  # non_monotone_points | point_out_of_window | overlapping_actions
    action_order: int
    detail: str


_REQUIRED = ("order", "action_type", "color", "opacity", "line_width",
             "timestamp_start", "timestamp_end", "points")
_POINT_REQUIRED = ("x", "y", "pointerType", "timestamp")


def _reject_nonfinite(value: str) -> None:
    raise MalformedJson(f"non-finite number {value!r} in session JSON")


def _parse_point(obj: Any, where: str) -> PointSample:
    if not isinstance(obj, dict):
        raise MalformedJson(f"point in {where} is not an object")
    for key in _POINT_REQUIRED:
        if key not in obj:
            raise MissingField(key, where)
    x, y = obj["x"], obj["y"]
    if not (isinstance(x, (int, float)) and isinstance(y, (int, float))
            and math.isfinite(x) and math.isfinite(y)):
        raise MalformedJson(f"non-finite point coordinates in {where}")
    pt = obj["pointerType"]
    if pt not in POINTER_TYPES:
        raise InvalidEnum(f"pointerType {pt!r} in {where}")
    ts = obj["timestamp"]
    if not isinstance(ts, int) or ts <= 0:
        raise MalformedJson(f"point timestamp must be a positive integer in {where}")
    return PointSample(float(x), float(y), pt, ts)


def _parse_action(obj: Any, index: int) -> DrawAction:
    where = f"action[{index}]"
    if not isinstance(obj, dict):
        raise MalformedJson(f"{where} is not an object")
    for key in _REQUIRED:
        if key not in obj:
            raise MissingField(key, where)
    try:
        action_type = ActionType(obj["action_type"])
    except ValueError:
        raise InvalidEnum(f"action_type {obj['action_type']!r} in {where}") from None

    points_raw = obj["points"]
    if not isinstance(points_raw, list):
        raise MalformedJson(f"points in {where} is not an array")
    if action_type in STROKE_TYPES and not points_raw:
        raise EmptyPoints(where)
    if action_type is ActionType.BUCKET_FILL and len(points_raw) != 1:
        raise MalformedJson(f"bucketFill carries exactly one point, got "
                            f"{len(points_raw)} in {where}")
    points = tuple(_parse_point(p, where) for p in points_raw)

    order = obj["order"]
    if not isinstance(order, int) or order < 1:
        raise MalformedJson(f"order must be a positive integer in {where}")
    color = obj["color"]
    if not (isinstance(color, str) and len(color) == 7 and color.startswith("#")):
        raise MalformedJson(f"color must be an RGB hex string in {where}")
    opacity = obj["opacity"]
    if not isinstance(opacity, (int, float)) or not 0.0 <= opacity <= 1.0:
        raise MalformedJson(f"opacity outside [0, 1] in {where}")
    line_width = obj["line_width"]
    if not isinstance(line_width, (int, float)) or line_width <= 0:
        raise MalformedJson(f"line_width must be > 0 in {where}")
    t0, t1 = obj["timestamp_start"], obj["timestamp_end"]
    if not (isinstance(t0, int) and isinstance(t1, int)):
        raise MalformedJson(f"timestamps must be integers in {where}")
    if t0 > t1:
        raise MalformedJson(f"timestamp_start after timestamp_end in {where}")

    extra = {k: v for k, v in obj.items() if k not in _REQUIRED}
    return DrawAction(order=order, action_type=action_type, color=color,
                      opacity=float(opacity), line_width=float(line_width),
                      timestamp_start=t0, timestamp_end=t1, points=points,
                      extra=extra)


def parse_session(raw_json: bytes | str, canvas_dims: tuple[int, int],
                  session_id: str = "",
                  questionnaire: QuestionnaireResponse | None = None,
                  final_image: str | None = None) -> DrawingSession:
    """Parse and validate a session log; actions are re-sorted by order.

    Unknown per-action fields are preserved in ``DrawAction.extra`` and
    otherwise ignored. Raises a typed error for every malformed input.
    """
    if isinstance(raw_json, bytes):
        try:
            raw_json = raw_json.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"not UTF-8: {exc}") from None
    try:
        data = json.loads(raw_json, parse_constant=_reject_nonfinite)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from None
    if not isinstance(data, list):
        raise MalformedJson("session JSON must be an array of actions")

    actions = [_parse_action(obj, i) for i, obj in enumerate(data)]

    seen: set[int] = set()
    for a in actions:
        if a.order in seen:
            raise DuplicateOrder(f"order {a.order} appears more than once")
        seen.add(a.order)
    if actions and seen != set(range(1, len(actions) + 1)):
        raise MalformedJson("order values must be 1..N with no gaps")

    actions.sort(key=lambda a: a.order)
    w, h = canvas_dims
    if w <= 0 or h <= 0:
        raise MalformedJson(f"canvas dimensions must be positive, got {w}x{h}")
    return DrawingSession(actions=tuple(actions), canvas_width=int(w),
                          canvas_height=int(h), session_id=session_id,
                          questionnaire=questionnaire, final_image=final_image)


def serialize_session(session: DrawingSession) -> str:
    """Canonical JSON for a session's action log (round-trips through parse)."""
    out = []
    for a in session.actions:
        obj: dict[str, Any] = {
            "order": a.order,
            "action_type": a.action_type.value,
            "color": a.color,
            "opacity": a.opacity,
            "line_width": a.line_width,
            "timestamp_start": a.timestamp_start,
            "timestamp_end": a.timestamp_end,
            "points": [{"x": p.x, "y": p.y, "pointerType": p.pointer_type,
                        "timestamp": p.timestamp} for p in a.points],
        }
        obj.update(a.extra)
        out.append(obj)
    return json.dumps(out, indent=1)


def parse_questionnaire(raw_json: bytes | str) -> QuestionnaireResponse:
    """Parse a questionnaire response; answer keys must be QUESTIONS entries."""
    if isinstance(raw_json, bytes):
        raw_json = raw_json.decode("utf-8")
    try:
        data = json.loads(raw_json)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from None
    if not isinstance(data, dict):
        raise MalformedJson("questionnaire JSON must be an object")
    answers_raw = data.get("answers", [])
    if not isinstance(answers_raw, list) or len(answers_raw) > len(QUESTIONS):
        raise MalformedJson("answers must be a list of at most 10 entries")
    answers = []
    for i, entry in enumerate(answers_raw):
        if not isinstance(entry, dict) or "question" not in entry or "answer" not in entry:
            raise MissingField("question/answer", f"answers[{i}]")
        if entry["question"] not in QUESTIONS:
            raise MalformedJson(f"unknown question in answers[{i}]: "
                                f"{entry['question']!r}")
        answers.append((entry["question"], str(entry["answer"])))
    age = data.get("age")
    if age is not None and not isinstance(age, int):
        raise MalformedJson("age must be an integer")
    gender = data.get("gender")
    if gender is not None and not isinstance(gender, str):
        raise MalformedJson("gender must be a string")
    return QuestionnaireResponse(age=age, gender=gender, answers=tuple(answers))


def validate_timing(session: DrawingSession) -> list[TimingAnomaly]:
    """Diagnostic scan for timestamp anomalies. Never raises, never mutates.

    Anomalies are advisory: downstream kinematics clamps negative durations
    to zero rather than rejecting jittery pointer-event streams.
    """
    anomalies: list[TimingAnomaly] = []
    for a in session.actions:
        prev = None
        for i, p in enumerate(a.points):
            if prev is not None and p.timestamp < prev:
                anomalies.append(TimingAnomaly(
                    "non_monotone_points", a.order,
                    f"point {i} timestamp {p.timestamp} < previous {prev}"))
            prev = p.timestamp
            if not a.timestamp_start <= p.timestamp <= a.timestamp_end:
                anomalies.append(TimingAnomaly(
                    "point_out_of_window", a.order,
                    f"point {i} timestamp {p.timestamp} outside "
                    f"[{a.timestamp_start}, {a.timestamp_end}]"))
    for first, second in zip(session.actions, session.actions[1:]):
        if second.timestamp_start < first.timestamp_end:
            anomalies.append(TimingAnomaly(
                "overlapping_actions", second.order,
                f"action {second.order} starts "
                f"{first.timestamp_end - second.timestamp_start} ms before "
                f"action {first.order} ends"))
    return anomalies


def questionnaire_to_dict(q: QuestionnaireResponse) -> dict[str, Any]:
    return {
        "age": q.age,
        "gender": q.gender,
        "answers": [{"question": question, "answer": answer}
                    for question, answer in q.answers],
    }


def points_xy(points: Iterable[PointSample]) -> list[tuple[float, float]]:
    return [(p.x, p.y) for p in points]
