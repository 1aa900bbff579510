"""Pure-numpy kernel implementations.

Fallback backend used when numba is unavailable or disabled via
``INKTRACE_NO_NUMBA=1``. Each function must stay numerically identical to
its twin in ``numba_impl`` (same expression trees, elementwise); the parity
suite asserts exact equality on masks, counts and images.
"""

from __future__ import annotations

import numpy as np


def polyline_length(xs: np.ndarray, ys: np.ndarray) -> float:
    if xs.size < 2:
        return 0.0
    dx = np.diff(xs)
    dy = np.diff(ys)
    return float(np.sqrt(dx * dx + dy * dy).sum())


def grid_counts(xs: np.ndarray, ys: np.ndarray, w: float, h: float) -> np.ndarray:
    counts = np.zeros((3, 3), dtype=np.int64)
    if xs.size == 0:
        return counts
    cols = np.clip(np.floor((xs * 3.0) / w).astype(np.int64), 0, 2)
    rows = np.clip(np.floor((ys * 3.0) / h).astype(np.int64), 0, 2)
    np.add.at(counts, (rows, cols), 1)
    return counts


def capsule_mask(xs: np.ndarray, ys: np.ndarray, radius: float,
                 height: int, width: int) -> np.ndarray:
    """Boolean coverage of a round-capped, round-joined polyline.

    A pixel (row, col) is covered when its center (col+0.5, row+0.5) lies
    within ``radius`` of any segment (inclusive boundary). A single point
    yields a stamped disk.
    """
    mask = np.zeros((height, width), dtype=np.bool_)
    r2 = radius * radius
    n = xs.size
    for i in range(max(n - 1, 1) if n else 0):
        x0, y0 = xs[i], ys[i]
        if n > 1:
            x1, y1 = xs[i + 1], ys[i + 1]
        else:
            x1, y1 = x0, y0
        lo_c = max(int(np.floor(min(x0, x1) - radius)), 0)
        hi_c = min(int(np.ceil(max(x0, x1) + radius)), width - 1)
        lo_r = max(int(np.floor(min(y0, y1) - radius)), 0)
        hi_r = min(int(np.ceil(max(y0, y1) + radius)), height - 1)
        if lo_c > hi_c or lo_r > hi_r:
            continue
        px = np.arange(lo_c, hi_c + 1, dtype=np.float64) + 0.5
        py = np.arange(lo_r, hi_r + 1, dtype=np.float64) + 0.5
        pxg, pyg = np.meshgrid(px, py)
        dx = x1 - x0
        dy = y1 - y0
        len2 = dx * dx + dy * dy
        if len2 > 0.0:
            t = ((pxg - x0) * dx + (pyg - y0) * dy) / len2
            t = np.clip(t, 0.0, 1.0)
        else:
            t = np.zeros_like(pxg)
        cx = x0 + t * dx
        cy = y0 + t * dy
        d2 = (pxg - cx) * (pxg - cx) + (pyg - cy) * (pyg - cy)
        mask[lo_r:hi_r + 1, lo_c:hi_c + 1] |= d2 <= r2
    return mask


def composite_over(img: np.ndarray, mask: np.ndarray,
                   r: int, g: int, b: int, alpha: float) -> None:
    """Source-over blend of an opaque color at ``alpha`` under ``mask``.

    Rounding is half-up (floor(x + 0.5)) so the TypeScript capture twin can
    reproduce results bit-exactly.
    """
    dst = img[mask].astype(np.float64)
    src = np.array([r, g, b], dtype=np.float64)
    img[mask] = np.floor(dst + alpha * (src - dst) + 0.5).astype(np.uint8)


def fill_white(img: np.ndarray, mask: np.ndarray) -> None:
    img[mask] = 255


def flood_fill(img: np.ndarray, sy: int, sx: int,
               nr: int, ng: int, nb: int) -> int:
    """4-connected flood fill replacing the seed's exact-color region.

    Mutates ``img`` in place; returns the number of filled pixels. A no-op
    when the replacement equals the seed color.
    """
    h, w = img.shape[:2]
    tr, tg, tb = int(img[sy, sx, 0]), int(img[sy, sx, 1]), int(img[sy, sx, 2])
    if (tr, tg, tb) == (nr, ng, nb):
        return 0
    match = ((img[:, :, 0] == tr) & (img[:, :, 1] == tg) & (img[:, :, 2] == tb))
    region = np.zeros((h, w), dtype=np.bool_)
    frontier = np.zeros((h, w), dtype=np.bool_)
    frontier[sy, sx] = True
    region[sy, sx] = True
    while frontier.any():
        nxt = np.zeros((h, w), dtype=np.bool_)
        nxt[1:, :] |= frontier[:-1, :]
        nxt[:-1, :] |= frontier[1:, :]
        nxt[:, 1:] |= frontier[:, :-1]
        nxt[:, :-1] |= frontier[:, 1:]
        frontier = nxt & match & ~region
        region |= frontier
    img[region] = (nr, ng, nb)
    return int(region.sum())
