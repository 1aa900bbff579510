#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Runs each kernel on realistic workloads (an 800x600 canvas, strokes of a
few hundred points) and reports per-call times plus the speedup. The numba
numbers exclude JIT compilation (one warmup call per kernel).

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from inktrace.kernels import numba_impl, numpy_impl

W, H = 800, 600


def _time(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    stroke_xs = rng.uniform(0, W, 400)
    stroke_ys = rng.uniform(0, H, 400)
    many_xs = rng.uniform(0, W, 200_000)
    many_ys = rng.uniform(0, H, 200_000)
    img = np.full((H, W, 3), 255, dtype=np.uint8)
    mask = rng.uniform(size=(H, W)) < 0.25
    fill_img = np.full((H, W, 3), 255, dtype=np.uint8)
    fill_img[100:500, 100:700] = (10, 20, 30)

    cases = [
        ("polyline_length (400 pts)",
         lambda m: m.polyline_length(stroke_xs, stroke_ys)),
        ("grid_counts (200k pts)",
         lambda m: m.grid_counts(many_xs, many_ys, float(W), float(H))),
        ("capsule_mask (400 pts, r=4)",
         lambda m: m.capsule_mask(stroke_xs, stroke_ys, 4.0, H, W)),
        ("composite_over (800x600)",
         lambda m: m.composite_over(img.copy(), mask, 30, 60, 90, 0.5)),
        ("flood_fill (400x600 region)",
         lambda m: m.flood_fill(fill_img.copy(), 300, 400, 200, 100, 50)),
    ]

    print(f"{'kernel':34} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, call in cases:
        call(numba_impl)  # JIT warmup
        t_numpy = _time(lambda: call(numpy_impl), args.repeats)
        t_numba = _time(lambda: call(numba_impl), args.repeats)
        print(f"{name:34} {t_numpy * 1e3:9.2f}ms {t_numba * 1e3:9.2f}ms "
              f"{t_numpy / t_numba:7.1f}x")


if __name__ == "__main__":
    main()
