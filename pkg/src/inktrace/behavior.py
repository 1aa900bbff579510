"""Behavioral features: eraser usage, drawing order, per-object counts.

Objects are (label, BoundingBox) pairs from the annotation set; strokes
are attributed with spatial.attribute_action. Erased area is the union of
the erase strokes' raster coverage (overlaps counted once), matching the
renderer's brush geometry exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .spatial import BoundingBox, attribute_action
from .stroke_log import ActionType, DrawingSession

Objects = list[tuple[str, BoundingBox]]


@dataclass(frozen=True)
class EraserProfile:
    events_total: int
    events_per_object: dict[str, int]  # includes "background" when nonzero
    total_erase_time: float            # seconds
    erased_area: int                   # union, pixels^2
    erased_area_per_object: dict[str, int]


@dataclass(frozen=True)
class ObjectTiming:
    label: str
    first_stroke_start: int  # epoch ms
    completion: int          # epoch ms


@dataclass(frozen=True)
class DrawingOrder:
    sequence: tuple[ObjectTiming, ...]  # sorted by first_stroke_start
    first_drawn: str | None


@dataclass(frozen=True)
class ActionCounts:
    per_object: dict[str, int]  # includes "background" when nonzero
    total: int


def _erase_mask(action, canvas: tuple[int, int]) -> np.ndarray:
    w, h = canvas
    xs = np.array([p.x for p in action.points], dtype=np.float64)
    ys = np.array([p.y for p in action.points], dtype=np.float64)
    return kernels.capsule_mask(xs, ys, action.line_width / 2.0, h, w)


def eraser_profile(session: DrawingSession, objects: Objects) -> EraserProfile:
    canvas = (session.canvas_width, session.canvas_height)
    erases = [a for a in session.actions if a.action_type is ActionType.ERASE]
    events_per: dict[str, int] = {}
    union = np.zeros((session.canvas_height, session.canvas_width), dtype=np.bool_)
    per_object_masks: dict[str, np.ndarray] = {}
    total_time = 0.0
    for a in erases:
        label = attribute_action(a, objects)
        events_per[label] = events_per.get(label, 0) + 1
        total_time += a.duration_s
        mask = _erase_mask(a, canvas)
        union |= mask
        if label in per_object_masks:
            per_object_masks[label] |= mask
        else:
            per_object_masks[label] = mask
    return EraserProfile(
        events_total=len(erases),
        events_per_object=events_per,
        total_erase_time=total_time,
        erased_area=int(union.sum()),
        erased_area_per_object={k: int(v.sum())
                                for k, v in per_object_masks.items()},
    )


def drawing_order(session: DrawingSession, objects: Objects) -> DrawingOrder:
    """Per-object first-touch and completion times over attributed strokes.

    Draw and erase strokes both count; completion extends with later
    touch-ups. Objects that received no strokes do not appear.
    """
    first: dict[str, int] = {}
    last: dict[str, int] = {}
    for a in session.strokes():
        label = attribute_action(a, objects)
        if label == "background":
            continue
        if label not in first or a.timestamp_start < first[label]:
            first[label] = a.timestamp_start
        if label not in last or a.timestamp_end > last[label]:
            last[label] = a.timestamp_end
    sequence = tuple(sorted(
        (ObjectTiming(label, first[label], last[label]) for label in first),
        key=lambda t: (t.first_stroke_start, t.label)))
    return DrawingOrder(sequence=sequence,
                        first_drawn=sequence[0].label if sequence else None)


def action_counts(session: DrawingSession, objects: Objects) -> ActionCounts:
    """Actions per attributed label (bucket fills attribute by their point)."""
    per: dict[str, int] = {}
    for a in session.actions:
        label = attribute_action(a, objects)
        per[label] = per.get(label, 0) + 1
    return ActionCounts(per_object=per, total=len(session.actions))
