"""Detection/classification results, the inference client, and the
feature-to-indicator rule engine.

Annotation JSON schema::

    {"objects": [{"label": "house", "box": [x_min, y_min, x_max, y_max],
                  "confidence": 0.97,
                  "parts": [{"label": "door", "box": [...], "confidence": 0.9}]}],
     "markers": {"leaning_house": {"value": true, "confidence": 0.83},
                 "dead_tree": false}}

Marker values accept a bare boolean (confidence 1.0). The rule table lives
in ``data/indicator_rules.json``; a rule fires when any of its features is
present, so adding predicates never retracts a fired meaning.
"""

from __future__ import annotations

import colorsys
import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import httpx

from .errors import (
    BadResponse,
    BoxOutOfCanvas,
    MalformedJson,
    PartWithoutParent,
    Timeout,
    UnknownLabel,
    Unreachable,
)
from .spatial import (
    BoundingBox,
    CLASS_ORDER,
    object_placement,
    size_category,
)
from .stroke_log import ActionType, DrawingSession

MAIN_LABELS = CLASS_ORDER
PART_LABELS: dict[str, tuple[str, ...]] = {
    "house": ("chimney", "door", "roof", "window"),
    "tree": ("branches", "crown", "fruit", "root", "trunk"),
    "person": ("eye", "hand", "head", "leg", "mouth", "neck", "nose"),
}
MARKER_FIELDS: dict[str, str] = {
    "leaning_house": "house",
    "house_2d": "house",
    "dead_tree": "tree",
    "flattened_crown": "tree",
    "poker_face": "person",
    "single_line_limbs": "person",
}

#: Table-derived color vocabulary used for predicate quantization.
PALETTE = ("white", "brown", "purple", "yellow", "orange", "green", "blue", "red")
_CHROMATIC = frozenset(PALETTE) - {"white"}
_REF_HUES = (("red", 0.0), ("orange", 30.0), ("yellow", 60.0),
             ("green", 120.0), ("blue", 225.0), ("purple", 285.0),
             ("red", 360.0))


@dataclass(frozen=True)
class PartAnnotation:
    label: str
    box: BoundingBox
    confidence: float


@dataclass(frozen=True)
class ObjectAnnotation:
    label: str
    box: BoundingBox
    confidence: float
    parts: tuple[PartAnnotation, ...] = ()

    def part_labels(self) -> set[str]:
        return {p.label for p in self.parts}


@dataclass(frozen=True)
class MarkerValue:
    value: bool
    confidence: float = 1.0


@dataclass(frozen=True)
class MarkerSet:
    leaning_house: MarkerValue | None = None
    house_2d: MarkerValue | None = None
    dead_tree: MarkerValue | None = None
    flattened_crown: MarkerValue | None = None
    poker_face: MarkerValue | None = None
    single_line_limbs: MarkerValue | None = None

    def items(self) -> list[tuple[str, MarkerValue]]:
        return [(name, getattr(self, name)) for name in MARKER_FIELDS
                if getattr(self, name) is not None]


@dataclass(frozen=True)
class AnnotationSet:
    objects: tuple[ObjectAnnotation, ...]
    markers: MarkerSet

    def by_label(self, label: str) -> list[ObjectAnnotation]:
        return [o for o in self.objects if o.label == label]

    def label_boxes(self) -> list[tuple[str, BoundingBox]]:
        return [(o.label, o.box) for o in self.objects]


@dataclass(frozen=True)
class IndicatorRule:
    features: tuple[str, ...]
    meaning: str


@dataclass(frozen=True)
class IndicatorMatch:
    meaning: str
    matched_features: tuple[str, ...]
    rule_index: int  # 1-based table row


def _parse_box(raw, canvas: tuple[int, int], where: str) -> BoundingBox:
    if (not isinstance(raw, list) or len(raw) != 4
            or not all(isinstance(v, (int, float)) for v in raw)):
        raise MalformedJson(f"box in {where} must be [x_min, y_min, x_max, y_max]")
    box = BoundingBox(*(float(v) for v in raw))
    if box.x_min >= box.x_max or box.y_min >= box.y_max:
        raise BoxOutOfCanvas(f"degenerate box in {where}")
    clipped = box.clipped(canvas)
    if clipped is None:
        raise BoxOutOfCanvas(f"box in {where} lies outside the canvas")
    return clipped


def parse_annotations(raw_json: bytes | str,
                      canvas: tuple[int, int]) -> AnnotationSet:
    """Validate an annotation document; boxes are clipped to the canvas."""
    if isinstance(raw_json, bytes):
        raw_json = raw_json.decode("utf-8")
    try:
        data = json.loads(raw_json)
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from None
    if not isinstance(data, dict):
        raise MalformedJson("annotation JSON must be an object")

    objects: list[ObjectAnnotation] = []
    for i, obj in enumerate(data.get("objects", [])):
        where = f"objects[{i}]"
        label = obj.get("label")
        if label not in MAIN_LABELS:
            raise UnknownLabel(f"{label!r} in {where}")
        box = _parse_box(obj.get("box"), canvas, where)
        parts: list[PartAnnotation] = []
        for j, part in enumerate(obj.get("parts", [])):
            pwhere = f"{where}.parts[{j}]"
            plabel = part.get("label")
            if not any(plabel in names for names in PART_LABELS.values()):
                raise UnknownLabel(f"{plabel!r} in {pwhere}")
            if plabel not in PART_LABELS.get(label, ()):
                raise PartWithoutParent(
                    f"part {plabel!r} is not valid for a {label} ({pwhere})")
            pbox = _parse_box(part.get("box"), canvas, pwhere)
            if not pbox.intersects(box):
                raise PartWithoutParent(
                    f"part {plabel!r} box does not touch its parent ({pwhere})")
            parts.append(PartAnnotation(plabel, pbox,
                                        float(part.get("confidence", 1.0))))
        objects.append(ObjectAnnotation(label, box,
                                        float(obj.get("confidence", 1.0)),
                                        tuple(parts)))

    present = {o.label for o in objects}
    marker_kwargs: dict[str, MarkerValue] = {}
    markers_raw = data.get("markers", {})
    if not isinstance(markers_raw, dict):
        raise MalformedJson("markers must be an object")
    for name, raw in markers_raw.items():
        if name not in MARKER_FIELDS:
            raise UnknownLabel(f"marker {name!r}")
        if isinstance(raw, bool):
            value = MarkerValue(raw)
        elif isinstance(raw, dict) and isinstance(raw.get("value"), bool):
            value = MarkerValue(raw["value"], float(raw.get("confidence", 1.0)))
        else:
            raise MalformedJson(f"marker {name!r} must be a boolean or "
                                "{value, confidence}")
        if MARKER_FIELDS[name] not in present:
            raise PartWithoutParent(
                f"marker {name!r} requires a {MARKER_FIELDS[name]} annotation")
        marker_kwargs[name] = value
    return AnnotationSet(objects=tuple(objects), markers=MarkerSet(**marker_kwargs))


def fetch_annotations(image_png: bytes, inference_endpoint: str,
                      timeout: float = 10.0,
                      client: httpx.Client | None = None) -> AnnotationSet:
    """POST a PNG to the inference service and parse its annotation JSON.

    The canvas for box validation is the image's own dimensions.
    """
    from PIL import Image
    import io

    with Image.open(io.BytesIO(image_png)) as img:
        canvas = img.size
    own = client is None
    client = client or httpx.Client(timeout=timeout)
    try:
        response = client.post(inference_endpoint, content=image_png,
                               headers={"content-type": "image/png"},
                               timeout=timeout)
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
        return parse_annotations(response.text, canvas)
    except MalformedJson as exc:
        raise BadResponse(f"invalid annotation payload: {exc.detail}") from None


def quantize_color(color: str) -> str:
    """Map an #RRGGBB value to the palette (plus "black" for dark ink)."""
    r = int(color[1:3], 16) / 255.0
    g = int(color[3:5], 16) / 255.0
    b = int(color[5:7], 16) / 255.0
    h, s, v = colorsys.rgb_to_hsv(r, g, b)
    if s <= 0.12:
        return "white" if v >= 0.6 else "black"
    if v <= 0.18:
        return "black"
    hue = h * 360.0
    if 10.0 <= hue <= 50.0 and v <= 0.65:
        return "brown"
    name, _ = min(_REF_HUES, key=lambda ref: abs(hue - ref[1]))
    return name


@dataclass(frozen=True)
class PredicateConfig:
    thick_width_px: float = 8.0
    faint_opacity: float = 0.35
    very_faint_opacity: float = 0.2
    excessive_color_count: int = 5
    edge_tolerance_px: float = 2.0


def derive_feature_predicates(annotations: AnnotationSet,
                              session: DrawingSession,
                              config: PredicateConfig = PredicateConfig(),
                              extra: tuple[str, ...] = ()) -> frozenset[str]:
    """Deterministic predicate set feeding the indicator rules.

    Derived here: object/part omissions, size and placement predicates,
    line-weight and color predicates, and classifier-marker passthrough.
    Placement of the drawing is read from the grid cells of the present
    main objects (unanimous column/row/cell); edge contact comes from the
    extent of the drawn points. Predicates the toolchain cannot observe
    (e.g. "fist") are accepted via ``extra`` only.
    """
    preds: set[str] = set(extra)
    canvas = (session.canvas_width, session.canvas_height)

    # omissions, per-object sizes, part inventory
    cells: list[tuple[int, int]] = []
    for label in ("house", "tree", "person"):
        objs = annotations.by_label(label)
        if not objs:
            preds.add(f"omitted_{label}")
            continue
        for obj in objs:
            cat = size_category(obj.box, canvas)
            if cat.value == "tiny":
                preds.add(f"very_small_{label}")
            placement = object_placement(obj.box, canvas)
            cells.append((placement.row, placement.col))
            have = obj.part_labels()
            for part in PART_LABELS[label]:
                if part not in have:
                    preds.add(f"no_{part}")
        parts_any = set().union(*(o.part_labels() for o in objs))
        if label == "person":
            if not parts_any & {"eye", "mouth", "nose"}:
                preds.add("loss_of_facial_features")
            if "hand" not in parts_any or "leg" not in parts_any:
                preds.add("loss_of_limbs")
            if "head" not in parts_any or "leg" not in parts_any:
                preds.add("incomplete_person")
        if label == "tree" and "root" in parts_any:
            preds.add("roots")
    if annotations.by_label("chimney_smoke"):
        preds.add("smoking_chimney")

    # drawing-level placement from main-object cells
    if cells:
        rows = {r for r, _ in cells}
        cols = {c for _, c in cells}
        if cols == {1}:
            preds.add("placement:left")
        if cols == {3}:
            preds.add("placement:right")
        if rows == {1}:
            preds.add("placement:high")
        if rows == {3}:
            preds.add("placement:low")
        if set(cells) == {(2, 2)}:
            preds.add("placement:central")
        if set(cells) == {(1, 1)}:
            preds.add("placement:upper_left")

    # ink extent: edge contact and overall drawing size
    ink = [(p.x, p.y) for a in session.actions
           if a.action_type in (ActionType.DRAW_LINE, ActionType.BUCKET_FILL)
           for p in a.points]
    if ink:
        xs = [x for x, _ in ink]
        ys = [y for _, y in ink]
        w, h = canvas
        tol = config.edge_tolerance_px
        if min(ys) <= tol:
            preds.add("placement:top_edge")
        if max(ys) >= h - tol:
            preds.add("placement:bottom_edge")
        if min(xs) <= tol:
            preds.add("placement:left_edge")
        if max(xs) >= w - tol:
            preds.add("placement:right_edge")
        if "placement:left_edge" in preds or "placement:right_edge" in preds:
            preds.add("placement:side_edge")
        extent_ratio = ((max(xs) - min(xs)) * (max(ys) - min(ys))) / (w * h)
        if extent_ratio < 1.0 / 9.0:
            preds.add("size:small")
        elif extent_ratio > 2.0 / 3.0:
            preds.add("size:large")

    # line weight and opacity
    draws = [a for a in session.actions if a.action_type is ActionType.DRAW_LINE]
    if draws:
        mean_width = sum(a.line_width for a in draws) / len(draws)
        if mean_width >= config.thick_width_px:
            preds.add("thick_lines")
        mean_opacity = sum(a.opacity for a in draws) / len(draws)
        if mean_opacity <= config.faint_opacity:
            preds.add("faint_lines")
        if mean_opacity <= config.very_faint_opacity:
            preds.add("very_faint_lines")

    # colors
    used = {quantize_color(a.color)
            for a in session.actions
            if a.action_type in (ActionType.DRAW_LINE, ActionType.BUCKET_FILL)}
    for name in used & set(PALETTE):
        preds.add(f"color:{name}")
    chromatic = used & _CHROMATIC
    if (draws or ink) and not chromatic:
        preds.add("absence_of_color")
    if len(chromatic) >= config.excessive_color_count:
        preds.add("excessive_color")

    # classifier markers pass through by name
    for name, value in annotations.markers.items():
        if value.value:
            preds.add(name)
    return frozenset(preds)


@lru_cache(maxsize=1)
def indicator_rules() -> tuple[IndicatorRule, ...]:
    """The shipped rule table (all rows, in table order)."""
    raw = resources.files("inktrace.data").joinpath("indicator_rules.json")
    data = json.loads(raw.read_text(encoding="utf-8"))
    return tuple(IndicatorRule(tuple(r["features"]), r["meaning"])
                 for r in data["rules"])


def map_indicators(predicates: frozenset[str] | set[str]) -> list[IndicatorMatch]:
    """Fire every rule with at least one matching feature.

    Results sort by number of matched features (descending), then table
    order, and carry the matched evidence.
    """
    matches: list[IndicatorMatch] = []
    for idx, rule in enumerate(indicator_rules(), start=1):
        matched = tuple(f for f in rule.features if f in predicates)
        if matched:
            matches.append(IndicatorMatch(rule.meaning, matched, idx))
    matches.sort(key=lambda m: (-len(m.matched_features), m.rule_index))
    return matches
