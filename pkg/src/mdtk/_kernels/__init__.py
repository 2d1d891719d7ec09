"""Numeric inner-loop kernels with a compiled core and a pure-Python twin.

The compiled extension (`mdtk._kernels._cy`, built from Cython) is used
when importable; otherwise the pure-Python/numpy implementations in
`mdtk._kernels._py` take over.  Set ``MDTK_PURE_PYTHON=1`` to force the
fallback.  Both backends implement identical integer semantics, so every
caller sees bit-identical results either way; `tests/test_kernels.py`
enforces this.

RNG never enters a kernel: kernels are deterministic array computations,
which keeps random streams independent of the backend in use.
"""
from __future__ import annotations

import os

from . import _py

NO_BOUND = _py.NO_BOUND

if os.environ.get("MDTK_PURE_PYTHON") == "1":
    _impl = _py
else:
    try:
        from . import _cy as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _py

BACKEND: str = _impl.BACKEND

has_same_key_overlap = _impl.has_same_key_overlap
pitch_shift_counts = _impl.pitch_shift_counts
onset_shift_counts = _impl.onset_shift_counts
offset_shift_counts = _impl.offset_shift_counts
time_shift_counts = _impl.time_shift_counts
rasterize = _impl.rasterize
onset_match_count = _impl.onset_match_count

__all__ = [
    "BACKEND",
    "NO_BOUND",
    "has_same_key_overlap",
    "pitch_shift_counts",
    "onset_shift_counts",
    "offset_shift_counts",
    "time_shift_counts",
    "rasterize",
    "onset_match_count",
]
