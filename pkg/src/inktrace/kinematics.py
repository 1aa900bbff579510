"""Stroke-level motion features: path length, speed, pauses, smoothness.

Speeds are pixels/second; durations seconds. Smoothness is the spectral
arc length of the resampled tangential speed profile (values are <= 0 and
closer to zero means smoother movement).
"""

from __future__ import annotations

import statistics
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NotAStroke, TooFewPoints, TooFewSamples, ZeroEnergyProfile
from .stroke_log import ActionType, DrawAction, DrawingSession, PointSample

DEFAULT_RESAMPLE_HZ = 100.0
DEFAULT_AMPLITUDE_THRESHOLD = 0.05
DEFAULT_MAX_CUTOFF_HZ = 20.0


@dataclass(frozen=True)
class SpeedProfile:
    """Uniformly resampled tangential speed of one stroke."""

    times: np.ndarray   # seconds, relative to the stroke's first point
    speeds: np.ndarray  # pixels/second, >= 0
    hz: float
    source_action_order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "times", np.asarray(self.times, dtype=np.float64))
        object.__setattr__(self, "speeds", np.asarray(self.speeds, dtype=np.float64))

    def scaled(self, k: float) -> "SpeedProfile":
        return SpeedProfile(self.times, self.speeds * k, self.hz,
                            self.source_action_order)


@dataclass(frozen=True)
class StrokeKinematics:
    length_px: float
    duration_s: float
    speed_px_per_s: float | None  # None when duration is 0 but length > 0
    line_width: float
    sparc_sal: float | None = None


@dataclass(frozen=True)
class IntervalStats:
    gaps: tuple[float, ...]
    total_pause: float
    mean: float | None
    variance: float | None  # population variance
    median: float | None


@dataclass(frozen=True)
class WidthSummary:
    min: float
    max: float
    mean: float
    mode: float  # smallest value among the most frequent


@dataclass(frozen=True)
class LineWidthStats:
    draw: WidthSummary | None
    erase: WidthSummary | None


def _xy_arrays(points) -> tuple[np.ndarray, np.ndarray]:
    if points and isinstance(points[0], PointSample):
        xs = np.array([p.x for p in points], dtype=np.float64)
        ys = np.array([p.y for p in points], dtype=np.float64)
    else:
        arr = np.asarray(points, dtype=np.float64).reshape(-1, 2)
        xs, ys = arr[:, 0].copy(), arr[:, 1].copy()
    return xs, ys


def stroke_length(points) -> float:
    """Sum of Euclidean distances between consecutive points (0 for a single
    point). Accepts PointSample sequences or (x, y) pairs."""
    if len(points) == 0:
        return 0.0
    xs, ys = _xy_arrays(points)
    return float(kernels.polyline_length(xs, ys))


def stroke_speed(action: DrawAction) -> StrokeKinematics:
    """Length, duration and mean speed (length/duration) of one stroke."""
    if action.action_type is ActionType.BUCKET_FILL:
        raise NotAStroke(f"action {action.order} is a bucket fill")
    length = stroke_length(action.points)
    duration = action.duration_s
    if duration > 0:
        speed = length / duration
    elif length == 0.0:
        speed = 0.0
    else:
        speed = None  # undefined: instantaneous displacement
    return StrokeKinematics(length_px=length, duration_s=duration,
                            speed_px_per_s=speed, line_width=action.line_width)


def inter_stroke_intervals(session: DrawingSession) -> IntervalStats:
    """Pauses between consecutive strokes (draw/erase actions, in order).

    Negative gaps from overlapping timestamps clamp to 0; validate_timing
    reports them separately. Statistics are absent for < 2 strokes.
    """
    strokes = session.strokes()
    gaps = [max(0, b.timestamp_start - a.timestamp_end) / 1000.0
            for a, b in zip(strokes, strokes[1:])]
    if not gaps:
        return IntervalStats(gaps=(), total_pause=0.0, mean=None,
                             variance=None, median=None)
    return IntervalStats(
        gaps=tuple(gaps),
        total_pause=sum(gaps),
        mean=statistics.fmean(gaps),
        variance=statistics.pvariance(gaps),
        median=statistics.median(gaps),
    )


def speed_profile(action: DrawAction,
                  resample_hz: float = DEFAULT_RESAMPLE_HZ) -> SpeedProfile:
    """Instantaneous per-segment speeds resampled onto a uniform grid.

    Segment speeds sit at segment midpoints and are linearly interpolated.
    Negative per-segment durations clamp to zero; a zero-duration segment
    contributes its displacement to the next segment with nonzero duration
    (trailing leftovers go to the last one).
    """
    pts = action.points
    if len(pts) < 2:
        raise TooFewPoints(f"action {action.order}: {len(pts)} point(s)")
    t_ms = np.array([p.timestamp for p in pts], dtype=np.float64)
    t = np.maximum.accumulate(t_ms - t_ms[0]) / 1000.0  # clamps negatives
    if t[-1] <= 0.0:
        raise TooFewPoints(f"action {action.order}: no distinct timestamps")
    xs, ys = _xy_arrays(pts)
    seg_d = np.hypot(np.diff(xs), np.diff(ys))
    seg_dt = np.diff(t)

    knot_t: list[float] = []
    knot_v: list[float] = []
    carry = 0.0
    for i in range(seg_d.size):
        carry += seg_d[i]
        if seg_dt[i] > 0.0:
            knot_t.append((t[i] + t[i + 1]) / 2.0)
            knot_v.append(carry / seg_dt[i])
            carry = 0.0
    if carry > 0.0 and knot_t:
        # trailing zero-duration displacement folds into the last knot
        last_dt = None
        for i in range(seg_d.size - 1, -1, -1):
            if seg_dt[i] > 0.0:
                last_dt = seg_dt[i]
                break
        knot_v[-1] += carry / last_dt

    kt = np.array(knot_t)
    kv = np.array(knot_v)
    n_grid = int(np.floor((kt[-1] - kt[0]) * resample_hz)) + 1
    grid = kt[0] + np.arange(n_grid, dtype=np.float64) / resample_hz
    speeds = np.interp(grid, kt, kv)
    return SpeedProfile(times=grid, speeds=speeds, hz=resample_hz,
                        source_action_order=action.order)


def sparc_spectrum(profile: SpeedProfile,
                   amplitude_threshold: float = DEFAULT_AMPLITUDE_THRESHOLD,
                   max_cutoff_hz: float = DEFAULT_MAX_CUTOFF_HZ,
                   ) -> tuple[np.ndarray, np.ndarray, float]:
    """Normalized magnitude spectrum of the profile up to the adaptive cutoff.

    Returns (frequencies, normalized magnitudes, cutoff). Magnitudes are
    V(w)/V(0); the cutoff is the largest frequency <= max_cutoff_hz at which
    the normalized magnitude still reaches ``amplitude_threshold``. The FFT
    is zero-padded to the next power of two >= 4x the sample count.
    """
    v = np.asarray(profile.speeds, dtype=np.float64)
    if v.size < 4:
        raise TooFewSamples(f"{v.size} samples, need >= 4")
    nfft = 1 << int(np.ceil(np.log2(4 * v.size)))
    spectrum = np.abs(np.fft.rfft(v, nfft))
    if spectrum[0] == 0.0:
        raise ZeroEnergyProfile("V(0) = 0")
    vhat = spectrum / spectrum[0]
    freqs = np.arange(vhat.size, dtype=np.float64) * (profile.hz / nfft)

    limit = min(max_cutoff_hz, profile.hz / 2.0)
    in_band = freqs <= limit
    above = in_band & (vhat >= amplitude_threshold)
    cutoff_idx = int(np.nonzero(above)[0][-1])  # index 0 always qualifies
    sel = slice(0, cutoff_idx + 1)
    return freqs[sel], vhat[sel], freqs[cutoff_idx]


def sparc(profile: SpeedProfile,
          amplitude_threshold: float = DEFAULT_AMPLITUDE_THRESHOLD,
          max_cutoff_hz: float = DEFAULT_MAX_CUTOFF_HZ) -> float:
    """Spectral arc length of the speed profile (negated; <= 0).

    Arc length of the curve (w/w_c, V(w)/V(0)) over the band [0, w_c],
    accumulated segment-by-segment over the sampled spectrum.
    """
    freqs, vhat, cutoff = sparc_spectrum(profile, amplitude_threshold,
                                         max_cutoff_hz)
    if freqs.size < 2:
        return 0.0  # spectrum collapses to DC: nothing but a point
    df = np.diff(freqs) / cutoff
    dv = np.diff(vhat)
    return float(-np.sum(np.sqrt(df * df + dv * dv)))


def line_width_stats(session: DrawingSession) -> LineWidthStats:
    """Width statistics over draw actions and erase actions, separately."""
    def summarize(widths: list[float]) -> WidthSummary | None:
        if not widths:
            return None
        counts = Counter(widths)
        top = max(counts.values())
        mode = min(w for w, c in counts.items() if c == top)
        return WidthSummary(min=min(widths), max=max(widths),
                            mean=statistics.fmean(widths), mode=mode)

    draw = [a.line_width for a in session.actions
            if a.action_type is ActionType.DRAW_LINE]
    erase = [a.line_width for a in session.actions
             if a.action_type is ActionType.ERASE]
    return LineWidthStats(draw=summarize(draw), erase=summarize(erase))
