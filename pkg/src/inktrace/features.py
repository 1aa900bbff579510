"""Session-level feature aggregation and its JSON form.

Pulls together kinematics, spatial statistics and behavior into one
profile; field names in the JSON form are fixed (length_px, duration_s,
speed_px_per_s, sparc_sal, pause_total_s, pause_median_s, pause_mean_s,
pause_variance_s2, eraser_events, eraser_time_s, eraser_area_px2, order,
actions_per_object).
"""

from __future__ import annotations

from dataclasses import dataclass

from . import behavior, kinematics, spatial
from .annotations import AnnotationSet
from .errors import InkError
from .stroke_log import ActionType, DrawingSession, validate_timing


@dataclass(frozen=True)
class ObjectFeatures:
    label: str
    box: spatial.BoundingBox
    confidence: float
    size: spatial.SizeCategory
    placement: spatial.GridPlacement
    stroke_count: int
    total_length_px: float
    mean_speed_px_per_s: float | None
    first_stroke_start: int | None
    completion: int | None
    eraser_events: int


@dataclass(frozen=True)
class FeatureProfile:
    canvas: tuple[int, int]
    per_stroke: tuple[tuple[int, str, kinematics.StrokeKinematics], ...]
    length_px: float
    duration_s: float
    speed_px_per_s: float | None
    sparc_sal: float | None  # mean of defined per-stroke values
    intervals: kinematics.IntervalStats
    widths: kinematics.LineWidthStats
    grid: spatial.PlacementGrid
    action_totals: dict[str, int]
    objects: tuple[ObjectFeatures, ...]
    eraser: behavior.EraserProfile | None
    order: behavior.DrawingOrder | None
    actions_per_object: dict[str, int] | None
    timing_anomalies: tuple
    fidelity: dict | None = None  # attached by the pipeline when a PNG exists

    def to_json_dict(self) -> dict:
        k = {
            "length_px": self.length_px,
            "duration_s": self.duration_s,
            "speed_px_per_s": self.speed_px_per_s,
            "sparc_sal": self.sparc_sal,
            "pause_total_s": self.intervals.total_pause,
            "pause_mean_s": self.intervals.mean,
            "pause_median_s": self.intervals.median,
            "pause_variance_s2": self.intervals.variance,
        }
        widths = {}
        for kind, summary in (("draw", self.widths.draw), ("erase", self.widths.erase)):
            widths[kind] = None if summary is None else {
                "min": summary.min, "max": summary.max,
                "mean": summary.mean, "mode": summary.mode,
            }
        out = {
            "canvas": {"width": self.canvas[0], "height": self.canvas[1]},
            "actions": self.action_totals,
            "kinematics": k,
            "per_stroke": [
                {"order": order, "action_type": kind,
                 "length_px": s.length_px, "duration_s": s.duration_s,
                 "speed_px_per_s": s.speed_px_per_s, "sparc_sal": s.sparc_sal,
                 "line_width": s.line_width}
                for order, kind, s in self.per_stroke
            ],
            "line_width": widths,
            "placement_grid": self.grid.to_lists(),
            "timing_anomalies": [
                {"kind": a.kind, "action_order": a.action_order, "detail": a.detail}
                for a in self.timing_anomalies
            ],
        }
        if self.objects or self.eraser is not None:
            out["objects"] = [
                {"label": o.label,
                 "box": [o.box.x_min, o.box.y_min, o.box.x_max, o.box.y_max],
                 "confidence": o.confidence,
                 "size": {"category": o.size.value, "area_ratio": o.size.area_ratio},
                 "placement": {"row": o.placement.row, "col": o.placement.col,
                               "tag": o.placement.tag},
                 "stroke_count": o.stroke_count,
                 "total_length_px": o.total_length_px,
                 "mean_speed_px_per_s": o.mean_speed_px_per_s,
                 "first_stroke_start": o.first_stroke_start,
                 "completion": o.completion,
                 "eraser_events": o.eraser_events}
                for o in self.objects
            ]
            assert self.eraser is not None and self.order is not None
            out["behavior"] = {
                "eraser_events": self.eraser.events_total,
                "eraser_time_s": self.eraser.total_erase_time,
                "eraser_area_px2": self.eraser.erased_area,
                "eraser_events_per_object": self.eraser.events_per_object,
                "eraser_area_per_object_px2": self.eraser.erased_area_per_object,
                "order": [
                    {"label": t.label, "first_stroke_start": t.first_stroke_start,
                     "completion": t.completion}
                    for t in self.order.sequence
                ],
                "first_drawn": self.order.first_drawn,
                "actions_per_object": self.actions_per_object,
            }
        if self.fidelity is not None:
            out["fidelity"] = self.fidelity
        return out


def _stroke_sal(action, resample_hz, amp_threshold, max_cutoff) -> float | None:
    try:
        profile = kinematics.speed_profile(action, resample_hz)
        return kinematics.sparc(profile, amp_threshold, max_cutoff)
    except InkError:
        return None  # too short / zero energy: smoothness undefined


def compute_feature_profile(
        session: DrawingSession,
        annotations: AnnotationSet | None = None,
        resample_hz: float = kinematics.DEFAULT_RESAMPLE_HZ,
        sparc_amplitude_threshold: float = kinematics.DEFAULT_AMPLITUDE_THRESHOLD,
        sparc_max_cutoff_hz: float = kinematics.DEFAULT_MAX_CUTOFF_HZ,
) -> FeatureProfile:
    """Compute every per-session feature; object features need annotations."""
    per_stroke = []
    sals = []
    total_length = 0.0
    total_duration = 0.0
    for a in session.strokes():
        k = kinematics.stroke_speed(a)
        sal = (_stroke_sal(a, resample_hz, sparc_amplitude_threshold,
                           sparc_max_cutoff_hz) if len(a.points) >= 2 else None)
        per_stroke.append((a.order, a.action_type.value,
                           kinematics.StrokeKinematics(
                               k.length_px, k.duration_s, k.speed_px_per_s,
                               k.line_width, sal)))
        total_length += k.length_px
        total_duration += k.duration_s
        if sal is not None:
            sals.append(sal)

    all_points = [(p.x, p.y) for a in session.actions for p in a.points]
    grid = spatial.placement_grid(all_points,
                                  (session.canvas_width, session.canvas_height))

    totals = {"total": len(session.actions)}
    for kind in ActionType:
        n = sum(1 for a in session.actions if a.action_type is kind)
        totals[kind.value] = n

    objects: tuple[ObjectFeatures, ...] = ()
    eraser = order = per_object = None
    if annotations is not None:
        label_boxes = annotations.label_boxes()
        eraser = behavior.eraser_profile(session, label_boxes)
        order = behavior.drawing_order(session, label_boxes)
        counts = behavior.action_counts(session, label_boxes)
        per_object = counts.per_object
        canvas = (session.canvas_width, session.canvas_height)
        by_object: dict[str, list] = {}
        for a in session.strokes():
            label = spatial.attribute_action(a, label_boxes)
            by_object.setdefault(label, []).append(a)
        obj_features = []
        for ann in annotations.objects:
            strokes = by_object.get(ann.label, [])
            length = sum(kinematics.stroke_length(s.points) for s in strokes)
            duration = sum(s.duration_s for s in strokes)
            timing = next((t for t in (order.sequence if order else ())
                           if t.label == ann.label), None)
            obj_features.append(ObjectFeatures(
                label=ann.label, box=ann.box, confidence=ann.confidence,
                size=spatial.size_category(ann.box, canvas),
                placement=spatial.object_placement(ann.box, canvas),
                stroke_count=len(strokes),
                total_length_px=length,
                mean_speed_px_per_s=(length / duration) if duration > 0 else None,
                first_stroke_start=timing.first_stroke_start if timing else None,
                completion=timing.completion if timing else None,
                eraser_events=eraser.events_per_object.get(ann.label, 0),
            ))
        objects = tuple(obj_features)

    return FeatureProfile(
        canvas=(session.canvas_width, session.canvas_height),
        per_stroke=tuple(per_stroke),
        length_px=total_length,
        duration_s=total_duration,
        speed_px_per_s=(total_length / total_duration) if total_duration > 0 else None,
        sparc_sal=(sum(sals) / len(sals)) if sals else None,
        intervals=kinematics.inter_stroke_intervals(session),
        widths=kinematics.line_width_stats(session),
        grid=grid,
        action_totals=totals,
        objects=objects,
        eraser=eraser,
        order=order,
        actions_per_object=per_object,
        timing_anomalies=tuple(validate_timing(session)),
    )
