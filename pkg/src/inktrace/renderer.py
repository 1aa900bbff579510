"""Deterministic replay of a session into a raster image.

Semantics (fixed so the capture UI can reproduce them bit-exactly):

* white opaque background, RGBA output with alpha always 255;
* draw: the whole action's round-capped/round-joined coverage composited
  once (source-over) at the action's color and opacity, hard edges, no AA;
* erase: the same coverage restored to background white;
* bucket: 4-connected flood fill of the seed pixel's exact-color region,
  recolored to the action color blended over it at the action's opacity.

Points outside the canvas are clipped and flagged, never fatal.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import kernels
from .errors import DimensionMismatch
from .stroke_log import ActionType, DrawAction, DrawingSession


@dataclass(frozen=True)
class RenderResult:
    image: np.ndarray  # (h, w, 4) uint8
    out_of_canvas_points: int


@dataclass(frozen=True)
class FidelityResult:
    pixel_match_ratio: float
    mean_channel_error: float
    resampled: bool


def _parse_hex(color: str) -> tuple[int, int, int]:
    return int(color[1:3], 16), int(color[3:5], 16), int(color[5:7], 16)


def _count_clipped(action: DrawAction, w: int, h: int) -> int:
    return sum(1 for p in action.points
               if not (0.0 <= p.x < w and 0.0 <= p.y < h))


def _apply_action(rgb: np.ndarray, action: DrawAction,
                  points: tuple, w: int, h: int) -> None:
    r, g, b = _parse_hex(action.color)
    if action.action_type is ActionType.BUCKET_FILL:
        p = points[0]
        sx = min(max(int(np.floor(p.x)), 0), w - 1)
        sy = min(max(int(np.floor(p.y)), 0), h - 1)
        alpha = action.opacity
        t = rgb[sy, sx].astype(np.float64)
        nr = int(np.floor(t[0] + alpha * (r - t[0]) + 0.5))
        ng = int(np.floor(t[1] + alpha * (g - t[1]) + 0.5))
        nb = int(np.floor(t[2] + alpha * (b - t[2]) + 0.5))
        kernels.flood_fill(rgb, sy, sx, nr, ng, nb)
        return
    xs = np.array([p.x for p in points], dtype=np.float64)
    ys = np.array([p.y for p in points], dtype=np.float64)
    mask = kernels.capsule_mask(xs, ys, action.line_width / 2.0, h, w)
    if action.action_type is ActionType.ERASE:
        kernels.fill_white(rgb, mask)
    else:
        kernels.composite_over(rgb, mask, r, g, b, action.opacity)


def replay(session: DrawingSession, at_ms: int | None = None) -> RenderResult:
    """Render the session (or its prefix up to ``at_ms``) onto a fresh canvas.

    With ``at_ms``, actions starting later are dropped and an in-flight
    stroke is truncated to the points recorded by then.
    """
    w, h = session.canvas_width, session.canvas_height
    rgb = np.full((h, w, 3), 255, dtype=np.uint8)
    clipped = 0
    for action in session.actions:
        points = action.points
        if at_ms is not None:
            if action.timestamp_start > at_ms:
                continue
            if action.timestamp_end > at_ms:
                points = tuple(p for p in points if p.timestamp <= at_ms)
                if not points:
                    continue
        clipped += _count_clipped(action, w, h)
        _apply_action(rgb, action, points, w, h)
    image = np.dstack([rgb, np.full((h, w), 255, dtype=np.uint8)])
    return RenderResult(image=image, out_of_canvas_points=clipped)


def reconstruct(session: DrawingSession, at_ms: int | None = None) -> np.ndarray:
    return replay(session, at_ms).image


def fidelity(reconstruction: np.ndarray, final_image: np.ndarray,
             resample: bool = True,
             channel_tolerance: int = 8) -> FidelityResult:
    """Pixel agreement between two rasters (symmetric in its arguments).

    A pixel matches when its largest RGB channel difference is within
    ``channel_tolerance`` (of 255). Differing dimensions are bilinearly
    resampled to the first argument's shape unless ``resample`` is off.
    """
    a = np.asarray(reconstruction)[:, :, :3]
    b = np.asarray(final_image)[:, :, :3]
    resampled = False
    if a.shape != b.shape:
        if not resample:
            raise DimensionMismatch(f"{a.shape} vs {b.shape}")
        pil = Image.fromarray(b).resize((a.shape[1], a.shape[0]),
                                        Image.Resampling.BILINEAR)
        b = np.asarray(pil)
        resampled = True
    diff = np.abs(a.astype(np.int16) - b.astype(np.int16))
    match = (diff.max(axis=2) <= channel_tolerance)
    return FidelityResult(pixel_match_ratio=float(match.mean()),
                          mean_channel_error=float(diff.mean()),
                          resampled=resampled)


def to_png_bytes(image: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(image).save(buf, format="PNG")
    return buf.getvalue()


def from_png_bytes(data: bytes) -> np.ndarray:
    img = Image.open(io.BytesIO(data)).convert("RGBA")
    return np.asarray(img)
