"""Hot numeric kernels with backend dispatch.

The numba-jitted backend is the default; set ``INKTRACE_NO_NUMBA=1`` to
force the pure-numpy fallback (also used automatically when numba cannot
be imported). ``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

_flag = os.environ.get("INKTRACE_NO_NUMBA", "").strip().lower()
_numba_disabled = _flag in {"1", "true", "yes"}

if not _numba_disabled:
    try:
        from . import numba_impl as _backend
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - exercised via env flag instead
        from . import numpy_impl as _backend
        BACKEND = "numpy"
else:
    from . import numpy_impl as _backend
    BACKEND = "numpy"

polyline_length = _backend.polyline_length
grid_counts = _backend.grid_counts
capsule_mask = _backend.capsule_mask
composite_over = _backend.composite_over
fill_white = _backend.fill_white
flood_fill = _backend.flood_fill

__all__ = [
    "BACKEND",
    "polyline_length",
    "grid_counts",
    "capsule_mask",
    "composite_over",
    "fill_white",
    "flood_fill",
]
