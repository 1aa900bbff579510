"""Numba-jitted kernel implementations (default backend).

Expressions mirror ``numpy_impl`` operation for operation; fastmath stays
off so results are bit-identical to the fallback.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def polyline_length(xs: np.ndarray, ys: np.ndarray) -> float:
    n = xs.size
    if n < 2:
        return 0.0
    total = 0.0
    for i in range(n - 1):
        dx = xs[i + 1] - xs[i]
        dy = ys[i + 1] - ys[i]
        total += math.sqrt(dx * dx + dy * dy)
    return total


@njit(cache=True)
def grid_counts(xs: np.ndarray, ys: np.ndarray, w: float, h: float) -> np.ndarray:
    counts = np.zeros((3, 3), dtype=np.int64)
    for i in range(xs.size):
        col = int(math.floor((xs[i] * 3.0) / w))
        row = int(math.floor((ys[i] * 3.0) / h))
        if col < 0:
            col = 0
        elif col > 2:
            col = 2
        if row < 0:
            row = 0
        elif row > 2:
            row = 2
        counts[row, col] += 1
    return counts


@njit(cache=True)
def capsule_mask(xs: np.ndarray, ys: np.ndarray, radius: float,
                 height: int, width: int) -> np.ndarray:
    mask = np.zeros((height, width), dtype=np.bool_)
    r2 = radius * radius
    n = xs.size
    if n == 0:
        return mask
    nseg = n - 1 if n > 1 else 1
    for i in range(nseg):
        x0 = xs[i]
        y0 = ys[i]
        if n > 1:
            x1 = xs[i + 1]
            y1 = ys[i + 1]
        else:
            x1 = x0
            y1 = y0
        lo_c = int(math.floor(min(x0, x1) - radius))
        hi_c = int(math.ceil(max(x0, x1) + radius))
        lo_r = int(math.floor(min(y0, y1) - radius))
        hi_r = int(math.ceil(max(y0, y1) + radius))
        if lo_c < 0:
            lo_c = 0
        if hi_c > width - 1:
            hi_c = width - 1
        if lo_r < 0:
            lo_r = 0
        if hi_r > height - 1:
            hi_r = height - 1
        if lo_c > hi_c or lo_r > hi_r:
            continue
        dx = x1 - x0
        dy = y1 - y0
        len2 = dx * dx + dy * dy
        for row in range(lo_r, hi_r + 1):
            py = row + 0.5
            for col in range(lo_c, hi_c + 1):
                px = col + 0.5
                if len2 > 0.0:
                    t = ((px - x0) * dx + (py - y0) * dy) / len2
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                cx = x0 + t * dx
                cy = y0 + t * dy
                d2 = (px - cx) * (px - cx) + (py - cy) * (py - cy)
                if d2 <= r2:
                    mask[row, col] = True
    return mask


@njit(cache=True)
def composite_over(img: np.ndarray, mask: np.ndarray,
                   r: int, g: int, b: int, alpha: float) -> None:
    h, w = img.shape[:2]
    src0 = float(r)
    src1 = float(g)
    src2 = float(b)
    for row in range(h):
        for col in range(w):
            if mask[row, col]:
                d0 = float(img[row, col, 0])
                d1 = float(img[row, col, 1])
                d2 = float(img[row, col, 2])
                img[row, col, 0] = np.uint8(math.floor(d0 + alpha * (src0 - d0) + 0.5))
                img[row, col, 1] = np.uint8(math.floor(d1 + alpha * (src1 - d1) + 0.5))
                img[row, col, 2] = np.uint8(math.floor(d2 + alpha * (src2 - d2) + 0.5))


@njit(cache=True)
def fill_white(img: np.ndarray, mask: np.ndarray) -> None:
    h, w = img.shape[:2]
    for row in range(h):
        for col in range(w):
            if mask[row, col]:
                img[row, col, 0] = 255
                img[row, col, 1] = 255
                img[row, col, 2] = 255


@njit(cache=True)
def flood_fill(img: np.ndarray, sy: int, sx: int,
               nr: int, ng: int, nb: int) -> int:
    h, w = img.shape[:2]
    tr = img[sy, sx, 0]
    tg = img[sy, sx, 1]
    tb = img[sy, sx, 2]
    if tr == nr and tg == ng and tb == nb:
        return 0
    # mark-on-push: recoloring a pixel marks it visited
    stack_y = np.empty(h * w, dtype=np.int64)
    stack_x = np.empty(h * w, dtype=np.int64)
    sp = 0
    stack_y[sp] = sy
    stack_x[sp] = sx
    sp += 1
    img[sy, sx, 0] = nr
    img[sy, sx, 1] = ng
    img[sy, sx, 2] = nb
    count = 0
    while sp > 0:
        sp -= 1
        y = stack_y[sp]
        x = stack_x[sp]
        count += 1
        for k in range(4):
            if k == 0:
                ny, nx = y - 1, x
            elif k == 1:
                ny, nx = y + 1, x
            elif k == 2:
                ny, nx = y, x - 1
            else:
                ny, nx = y, x + 1
            if 0 <= ny < h and 0 <= nx < w:
                if (img[ny, nx, 0] == tr and img[ny, nx, 1] == tg
                        and img[ny, nx, 2] == tb):
                    img[ny, nx, 0] = nr
                    img[ny, nx, 1] = ng
                    img[ny, nx, 2] = nb
                    stack_y[sp] = ny
                    stack_x[sp] = nx
                    sp += 1
    return count
