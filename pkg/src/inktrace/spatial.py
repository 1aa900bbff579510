"""Canvas-space features: 3x3 placement grid, size classes, attribution.

Grid cells are row-major with (1, 1) the upper-left cell; a point lands in
cell (floor(3y/h)+1, floor(3x/w)+1), clamped, with interior boundaries
falling in the higher-index cell.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .stroke_log import DrawAction

#: Fixed ordering of main object classes (used for attribution tie-breaks).
CLASS_ORDER = ("bird", "cloud", "house", "tree", "person", "flower",
               "mountain", "sun", "chimney_smoke")

TINY_BELOW = 1.0 / 9.0
HUGE_ABOVE = 2.0 / 3.0

_HORIZONTAL = ("left", "center", "right")
_VERTICAL = ("upper", "middle", "lower")


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    @property
    def centroid(self) -> tuple[float, float]:
        return ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def intersects(self, other: "BoundingBox") -> bool:
        return (self.x_min <= other.x_max and other.x_min <= self.x_max
                and self.y_min <= other.y_max and other.y_min <= self.y_max)

    def clipped(self, canvas: tuple[int, int]) -> "BoundingBox | None":
        """Clip to the canvas; None when nothing remains."""
        w, h = canvas
        x0, y0 = max(self.x_min, 0.0), max(self.y_min, 0.0)
        x1, y1 = min(self.x_max, float(w)), min(self.y_max, float(h))
        if x0 >= x1 or y0 >= y1:
            return None
        return BoundingBox(x0, y0, x1, y1)


@dataclass(frozen=True)
class PlacementGrid:
    counts: np.ndarray        # 3x3 int64
    probabilities: np.ndarray | None  # 3x3 float64, None when no points

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_lists(self) -> dict:
        return {
            "counts": self.counts.tolist(),
            "probabilities": None if self.probabilities is None
            else self.probabilities.tolist(),
        }


@dataclass(frozen=True)
class SizeCategory:
    value: str  # tiny | normal | huge
    area_ratio: float


@dataclass(frozen=True)
class GridPlacement:
    row: int  # 1..3, 1 = top
    col: int  # 1..3, 1 = left
    horizontal: str  # left | center | right
    vertical: str    # upper | middle | lower

    @property
    def tag(self) -> str:
        return f"{self.vertical} {self.horizontal}"


def cell_of(x: float, y: float, canvas: tuple[int, int]) -> tuple[int, int]:
    """1-based (row, col) of a point, floor rule, clamped to the grid."""
    w, h = canvas
    col = min(max(int(np.floor((x * 3.0) / w)), 0), 2)
    row = min(max(int(np.floor((y * 3.0) / h)), 0), 2)
    return row + 1, col + 1


def placement_grid(points, canvas: tuple[int, int]) -> PlacementGrid:
    """Normalized distribution of points over the 3x3 grid.

    Probabilities are counts/total and sum to 1; with no points the counts
    are zero and probabilities are undefined (None).
    """
    w, h = canvas
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    counts = kernels.grid_counts(np.ascontiguousarray(pts[:, 0]),
                                 np.ascontiguousarray(pts[:, 1]),
                                 float(w), float(h))
    total = counts.sum()
    probs = counts / total if total > 0 else None
    return PlacementGrid(counts=counts, probabilities=probs)


def classify_ratio(ratio: float) -> str:
    """tiny below 1/9, huge above 2/3, otherwise normal (closed interval)."""
    if ratio < TINY_BELOW:
        return "tiny"
    if ratio > HUGE_ABOVE:
        return "huge"
    return "normal"


def size_category(object_box: BoundingBox, canvas: tuple[int, int]) -> SizeCategory:
    w, h = canvas
    ratio = object_box.area / (float(w) * float(h))
    return SizeCategory(value=classify_ratio(ratio), area_ratio=ratio)


def object_placement(object_box: BoundingBox, canvas: tuple[int, int]) -> GridPlacement:
    """Grid cell of the box centroid plus its semantic position tag."""
    cx, cy = object_box.centroid
    row, col = cell_of(cx, cy, canvas)
    return GridPlacement(row=row, col=col, horizontal=_HORIZONTAL[col - 1],
                         vertical=_VERTICAL[row - 1])


def _class_rank(label: str) -> tuple[int, str]:
    try:
        return (CLASS_ORDER.index(label), label)
    except ValueError:
        return (len(CLASS_ORDER), label)


def attribute_action(action: DrawAction,
                     objects: list[tuple[str, BoundingBox]]) -> str:
    """Label of the object holding the majority of the action's points.

    The winner needs >= 0.5 of the points inside its (inclusive) box; ties
    break to the smallest box area, then the earliest label in CLASS_ORDER.
    Returns "background" otherwise.
    """
    if not objects or not action.points:
        return "background"
    n = len(action.points)
    best: tuple[float, float, tuple[int, str], str] | None = None
    for label, box in objects:
        inside = sum(1 for p in action.points if box.contains(p.x, p.y))
        frac = inside / n
        key = (-frac, box.area, _class_rank(label))
        if best is None or key < best[:3]:
            best = (*key, label)
    if best is not None and -best[0] >= 0.5:
        return best[3]
    return "background"
