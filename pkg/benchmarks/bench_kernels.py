#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times each kernel on realistic inputs and the end-to-end Degrader
throughput under both backends.  Run after `pip install -e .`:

    python benchmarks/bench_kernels.py [--notes 200] [--repeats 200]
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from mdtk._kernels import _py

try:
    from mdtk._kernels import _cy
except ImportError:
    _cy = None

NO_BOUND = _py.NO_BOUND


def make_arrays(n_notes: int, seed: int = 7):
    gen = np.random.default_rng(seed)
    pitch = gen.integers(40, 90, size=n_notes).astype(np.int64)
    onset = np.sort(gen.integers(0, n_notes * 120, size=n_notes)).astype(np.int64)
    dur = gen.integers(60, 700, size=n_notes).astype(np.int64)
    return pitch, onset, onset + dur


def time_call(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(3):
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_kernels(n_notes: int, repeats: int) -> None:
    pitch, onset, offset = make_arrays(n_notes)
    end = int(offset.max())
    frames = end // 40 + 1
    onf = onset // 40
    off = np.maximum(offset // 40, onf + 1)

    cases = {
        "has_same_key_overlap": lambda m: m.has_same_key_overlap(pitch, onset, offset),
        "pitch_shift_counts": lambda m: m.pitch_shift_counts(pitch, onset, offset, 21, 108),
        "onset_shift_counts": lambda m: m.onset_shift_counts(
            pitch, onset, offset, 50, NO_BOUND, 50, NO_BOUND
        ),
        "offset_shift_counts": lambda m: m.offset_shift_counts(
            pitch, onset, offset, end, 50, NO_BOUND, 50, NO_BOUND
        ),
        "time_shift_counts": lambda m: m.time_shift_counts(
            pitch, onset, offset, end, 50, NO_BOUND
        ),
        "rasterize": lambda m: m.rasterize(pitch, onf, off, frames),
        "onset_match_count": lambda m: m.onset_match_count(
            pitch, onset, pitch, onset, 50
        ),
    }
    print(f"\nkernels on {n_notes} notes ({repeats} repeats, best of 3):")
    print(f"{'kernel':<24}{'python':>12}{'cython':>12}{'speedup':>9}")
    for name, call in cases.items():
        t_py = time_call(lambda: call(_py), repeats)
        if _cy is None:
            print(f"{name:<24}{t_py * 1e6:>10.1f}us{'-':>12}{'-':>9}")
            continue
        t_cy = time_call(lambda: call(_cy), repeats)
        print(
            f"{name:<24}{t_py * 1e6:>10.1f}us{t_cy * 1e6:>10.1f}us"
            f"{t_py / t_cy:>8.1f}x"
        )


DEGRADE_DRIVER = """
import sys, time
from mdtk._kernels import BACKEND
from mdtk.core import Excerpt, Note
from mdtk.degrader import Degrader, DegraderConfig

n_notes = int(sys.argv[1])
notes = []
cursor = {}
import numpy as np
gen = np.random.default_rng(3)
for _ in range(n_notes):
    p = int(gen.integers(40, 90))
    start = cursor.get(p, 0) + int(gen.integers(0, 200))
    d = int(gen.integers(120, 600))
    notes.append(Note(p, start, d))
    cursor[p] = start + d
excerpt = Excerpt(notes)
degrader = Degrader(DegraderConfig(seed=1))
n = 3000
start = time.perf_counter()
for _ in range(n):
    degrader.degrade(excerpt)
dt = time.perf_counter() - start
print(f"{BACKEND}: {n / dt:,.0f} degrade calls/s ({n_notes} notes)")
"""


def bench_degrader(n_notes: int) -> None:
    print("\nend-to-end Degrader throughput:")
    for env_value in ("0", "1"):
        env = dict(os.environ, MDTK_PURE_PYTHON=env_value)
        result = subprocess.run(
            [sys.executable, "-c", DEGRADE_DRIVER, str(n_notes)],
            env=env, capture_output=True, text=True,
        )
        sys.stdout.write(result.stdout or result.stderr)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--notes", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    if _cy is None:
        print("compiled backend not built; showing pure-Python timings only")
    bench_kernels(args.notes, args.repeats)
    bench_degrader(args.notes)


if __name__ == "__main__":
    main()
