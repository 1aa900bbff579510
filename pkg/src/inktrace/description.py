"""Template-based textual description of a drawing session.

Every line is rendered from a fixed template over one input field and
carries a provenance tag, so the text layer introduces no content of its
own: given correct inputs, precision and recall against the annotation
set are 1.0 by construction. Output is byte-stable for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .annotations import AnnotationSet, PART_LABELS, quantize_color
from .features import FeatureProfile
from .spatial import attribute_action
from .stroke_log import ActionType, DrawingSession

SCHEMA_VERSION = "1"

_MARKER_LINES = {
    "leaning_house": ("house", "leaning: yes"),
    "house_2d": ("house", "dimensionality: 2D"),
    "dead_tree": ("tree", "dead: yes"),
    "flattened_crown": ("tree", "flattened crown: yes"),
    "poker_face": ("person", "poker face: yes"),
    "single_line_limbs": ("person", "single line limbs: yes"),
}
_ENVIRONMENT = ("bird", "cloud", "flower", "mountain", "sun", "chimney_smoke")
_ORDINALS = ("1st", "2nd", "3rd")


@dataclass(frozen=True)
class Line:
    text: str
    source: str  # provenance: dotted path of the input field


@dataclass(frozen=True)
class Section:
    name: str
    lines: tuple[Line, ...]


@dataclass(frozen=True)
class DescriptionDocument:
    schema_version: str
    sections: tuple[Section, ...]

    def section(self, name: str) -> Section | None:
        return next((s for s in self.sections if s.name == name), None)

    def provenance(self) -> list[tuple[str, str]]:
        return [(line.text, line.source)
                for s in self.sections for line in s.lines]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "sections": [
                {"name": s.name,
                 "lines": [{"text": ln.text, "source": ln.source}
                           for ln in s.lines]}
                for s in self.sections
            ],
        }


def _fmt(value: float, digits: int = 2) -> str:
    return f"{value:.{digits}f}"


def _ordinal(i: int) -> str:
    return _ORDINALS[i] if i < 3 else f"{i + 1}th"


def _object_section(label: str, annotations: AnnotationSet | None,
                    profile: FeatureProfile, session: DrawingSession,
                    sequence_labels: list[str]) -> Section:
    lines: list[Line] = []
    objs = annotations.by_label(label) if annotations is not None else []
    if not objs:
        source = (f"annotations.objects[{label}]" if annotations is not None
                  else "annotations(absent)")
        lines.append(Line(f"{label}: omitted", source))
        return Section(label, tuple(lines))

    obj = objs[0]
    feats = next((o for o in profile.objects if o.label == label), None)
    lines.append(Line(f"{label}: present", f"annotations.objects[{label}]"))
    if feats is not None:
        lines.append(Line(
            f"size: {feats.size.value} (area ratio {_fmt(feats.size.area_ratio, 3)})",
            f"features.objects[{label}].size"))
        lines.append(Line(
            f"placement: {feats.placement.tag} "
            f"(row {feats.placement.row}, col {feats.placement.col})",
            f"features.objects[{label}].placement"))

    expected = PART_LABELS[label]
    have = [p for p in expected if p in obj.part_labels()]
    missing = [p for p in expected if p not in obj.part_labels()]
    if have:
        lines.append(Line("parts present: " + ", ".join(have),
                          f"annotations.objects[{label}].parts"))
    if missing:
        lines.append(Line("parts omitted: " + ", ".join(missing),
                          f"annotations.objects[{label}].parts"))

    if annotations is not None:
        for marker, (owner, text) in _MARKER_LINES.items():
            if owner != label:
                continue
            value = getattr(annotations.markers, marker)
            if value is not None and value.value:
                lines.append(Line(text, f"markers.{marker}"))

    colors = sorted({quantize_color(a.color) for a in session.strokes()
                     if annotations is not None
                     and attribute_action(a, annotations.label_boxes()) == label
                     and a.action_type is ActionType.DRAW_LINE})
    if colors:
        lines.append(Line("colors: " + ", ".join(colors),
                          f"session.actions[{label}].color"))

    if feats is not None:
        lines.append(Line(f"strokes: {feats.stroke_count}",
                          f"features.objects[{label}].stroke_count"))
        if feats.mean_speed_px_per_s is not None:
            lines.append(Line(
                f"mean speed: {_fmt(feats.mean_speed_px_per_s, 1)} px/s",
                f"features.objects[{label}].mean_speed_px_per_s"))
        if feats.eraser_events:
            lines.append(Line(f"eraser events: {feats.eraser_events}",
                              f"features.objects[{label}].eraser_events"))
        if label in sequence_labels:
            lines.append(Line(
                f"drawn: {_ordinal(sequence_labels.index(label))} of "
                f"{len(sequence_labels)}",
                "features.behavior.order"))
    return Section(label, tuple(lines))


def _scene_section(annotations: AnnotationSet | None,
                   profile: FeatureProfile) -> Section:
    lines: list[Line] = []
    if annotations is not None:
        for label in _ENVIRONMENT:
            count = len(annotations.by_label(label))
            if count:
                suffix = f" x{count}" if count > 1 else ""
                lines.append(Line(f"environment: {label}{suffix}",
                                  f"annotations.objects[{label}]"))
    if profile.grid.probabilities is not None:
        probs = profile.grid.probabilities
        row, col = divmod(int(probs.argmax()), 3)
        tags_v = ("upper", "middle", "lower")
        tags_h = ("left", "center", "right")
        lines.append(Line(
            f"ink concentration: {tags_v[row]} {tags_h[col]} cell "
            f"(share {_fmt(float(probs.max()), 2)})",
            "features.placement_grid"))
    return Section("scene", tuple(lines))


def _behavior_section(profile: FeatureProfile) -> Section:
    lines: list[Line] = []
    totals = profile.action_totals
    lines.append(Line(
        f"actions: {totals['total']} (draw {totals['drawLine']}, "
        f"erase {totals['erase']}, bucket {totals['bucketFill']})",
        "features.actions"))
    if profile.order is not None and profile.order.sequence:
        labels = [t.label for t in profile.order.sequence]
        lines.append(Line("drawing order: " + ", ".join(labels),
                          "features.behavior.order"))
        first = profile.order.sequence[0]
        lines.append(Line(
            f"first drawn: {first.label} (completed after "
            f"{_fmt((first.completion - first.first_stroke_start) / 1000.0)} s)",
            "features.behavior.first_drawn"))
    if profile.length_px > 0:
        lines.append(Line(f"total ink length: {_fmt(profile.length_px, 1)} px",
                          "features.kinematics.length_px"))
    if profile.speed_px_per_s is not None and profile.duration_s > 0:
        lines.append(Line(
            f"mean stroke speed: {_fmt(profile.speed_px_per_s, 1)} px/s",
            "features.kinematics.speed_px_per_s"))
    if profile.intervals.mean is not None:
        lines.append(Line(
            f"pauses: total {_fmt(profile.intervals.total_pause)} s, "
            f"mean {_fmt(profile.intervals.mean)} s, "
            f"median {_fmt(profile.intervals.median)} s",
            "features.kinematics.pauses"))
    if profile.sparc_sal is not None:
        lines.append(Line(
            f"smoothness (mean spectral arc length): {_fmt(profile.sparc_sal, 3)}",
            "features.kinematics.sparc_sal"))
    if profile.widths.draw is not None:
        d = profile.widths.draw
        lines.append(Line(
            f"line width (draw): min {d.min:g}, max {d.max:g}, "
            f"mean {_fmt(d.mean, 1)}, mode {d.mode:g}",
            "features.line_width.draw"))
    if profile.eraser is not None and profile.eraser.events_total:
        e = profile.eraser
        lines.append(Line(
            f"eraser: {e.events_total} events, "
            f"{_fmt(e.total_erase_time)} s, {e.erased_area} px^2",
            "features.behavior.eraser"))
    if profile.fidelity is not None:
        lines.append(Line(
            f"replay fidelity: {_fmt(profile.fidelity['pixel_match_ratio'], 4)} "
            "pixel match",
            "features.fidelity"))
    return Section("behavior", tuple(lines))


def _questionnaire_section(session: DrawingSession) -> Section:
    lines: list[Line] = []
    if session.questionnaire is not None:
        q = session.questionnaire
        if q.age is not None:
            lines.append(Line(f"age: {q.age}", "questionnaire.age"))
        if q.gender:
            lines.append(Line(f"gender: {q.gender}", "questionnaire.gender"))
        for i, (question, answer) in enumerate(q.answers):
            lines.append(Line(f"Q: {question} A: {answer}",
                              f"questionnaire.answers[{i}]"))
    return Section("questionnaire", tuple(lines))


def generate_description(annotations: AnnotationSet | None,
                         profile: FeatureProfile,
                         session: DrawingSession) -> DescriptionDocument:
    """Render the structured description (absent inputs stated explicitly)."""
    sequence_labels = ([t.label for t in profile.order.sequence]
                       if profile.order is not None else [])
    sections = [
        _object_section("house", annotations, profile, session, sequence_labels),
        _object_section("tree", annotations, profile, session, sequence_labels),
        _object_section("person", annotations, profile, session, sequence_labels),
        _scene_section(annotations, profile),
        _behavior_section(profile),
        _questionnaire_section(session),
    ]
    return DescriptionDocument(schema_version=SCHEMA_VERSION,
                               sections=tuple(sections))


def to_query(doc: DescriptionDocument) -> str:
    """Flatten the document into the retrieval query text (byte-stable)."""
    parts: list[str] = []
    for section in doc.sections:
        if not section.lines:
            continue
        parts.append(f"## {section.name}")
        parts.extend(line.text for line in section.lines)
        parts.append("")
    return "\n".join(parts).rstrip("\n") + "\n"
