"""Pure-Python/numpy kernel implementations (the fallback backend).

All functions take canonical-order int64 arrays.  Unbounded parameters
are passed as NO_BOUND so the arithmetic stays in plain int64.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

NO_BOUND = 2**62


def _icount(lo: int, hi: int, a: int, b: int) -> int:
    """Number of integers in [lo, hi] ∩ [a, b]."""
    lo2 = max(lo, a)
    hi2 = min(hi, b)
    return hi2 - lo2 + 1 if hi2 >= lo2 else 0


def has_same_key_overlap(key: np.ndarray, onset: np.ndarray, offset: np.ndarray) -> bool:
    """True iff two notes with equal key overlap in time.

    `key` is any grouping integer (e.g. pitch, or pitch + 128 * track).
    Intervals are half-open [onset, offset).
    """
    n = len(key)
    order = np.lexsort((onset, key))
    k = key[order]
    on = onset[order]
    off = offset[order]
    max_off = -(2**62)
    for i in range(n):
        if i > 0 and k[i] == k[i - 1]:
            if on[i] < max_off:
                return True
            max_off = max(max_off, off[i])
        else:
            max_off = off[i]
    return False


def pitch_shift_counts(
    pitch: np.ndarray,
    onset: np.ndarray,
    offset: np.ndarray,
    min_pitch: int,
    max_pitch: int,
) -> np.ndarray:
    """Per note, the number of valid replacement pitches.

    A pitch is valid when it lies in [min_pitch, max_pitch], differs from
    the note's own pitch, and no time-overlapping note already holds it.
    """
    n = len(pitch)
    width = max_pitch - min_pitch + 1
    counts = np.zeros(n, dtype=np.int64)
    for i in range(n):
        overlapping = (onset < offset[i]) & (offset > onset[i])
        overlapping[i] = False
        blocked = np.unique(pitch[overlapping])
        blocked = blocked[(blocked >= min_pitch) & (blocked <= max_pitch)]
        taken = len(blocked)
        own = min_pitch <= pitch[i] <= max_pitch and pitch[i] not in blocked
        counts[i] = width - taken - (1 if own else 0)
    return counts


def onset_shift_counts(
    pitch: np.ndarray,
    onset: np.ndarray,
    offset: np.ndarray,
    min_shift: int,
    max_shift: int,
    min_dur: int,
    max_dur: int,
) -> np.ndarray:
    """Per note, the number of valid new onsets (offset held fixed)."""
    n = len(pitch)
    counts = np.empty(n, dtype=np.int64)
    for i in range(n):
        o = int(onset[i])
        f = int(offset[i])
        lo = max(0, f - max_dur)
        same = (pitch == pitch[i]) & (onset < f)
        same[i] = False
        if same.any():
            lo = max(lo, int(offset[same].max()))
        hi = f - min_dur
        counts[i] = _icount(lo, hi, o - max_shift, o - min_shift) + _icount(
            lo, hi, o + min_shift, o + max_shift
        )
    return counts


def offset_shift_counts(
    pitch: np.ndarray,
    onset: np.ndarray,
    offset: np.ndarray,
    excerpt_end: int,
    min_shift: int,
    max_shift: int,
    min_dur: int,
    max_dur: int,
) -> np.ndarray:
    """Per note, the number of valid new offsets (onset held fixed)."""
    n = len(pitch)
    counts = np.empty(n, dtype=np.int64)
    for i in range(n):
        o = int(onset[i])
        f = int(offset[i])
        hi = min(excerpt_end, o + max_dur)
        same = (pitch == pitch[i]) & (offset > o)
        same[i] = False
        if same.any():
            hi = min(hi, int(onset[same].min()))
        lo = o + min_dur
        counts[i] = _icount(lo, hi, f - max_shift, f - min_shift) + _icount(
            lo, hi, f + min_shift, f + max_shift
        )
    return counts


def _subtract_blocked(wlo: int, whi: int, blocked: list[tuple[int, int]]) -> int:
    """Integers in [wlo, whi] not covered by the sorted blocked intervals."""
    if whi < wlo:
        return 0
    total = whi - wlo + 1
    cover = 0
    cur_lo = None
    cur_hi = None
    for blo, bhi in blocked:
        if bhi < blo:
            continue
        if cur_lo is None:
            cur_lo, cur_hi = blo, bhi
        elif blo <= cur_hi + 1:
            cur_hi = max(cur_hi, bhi)
        else:
            cover += _icount(cur_lo, cur_hi, wlo, whi)
            cur_lo, cur_hi = blo, bhi
    if cur_lo is not None:
        cover += _icount(cur_lo, cur_hi, wlo, whi)
    return total - cover


def time_shift_counts(
    pitch: np.ndarray,
    onset: np.ndarray,
    offset: np.ndarray,
    excerpt_end: int,
    min_shift: int,
    max_shift: int,
) -> np.ndarray:
    """Per note, the number of valid translated onsets (duration fixed)."""
    n = len(pitch)
    counts = np.empty(n, dtype=np.int64)
    by_pitch: dict[int, list[int]] = {}
    for j in range(n):
        by_pitch.setdefault(int(pitch[j]), []).append(j)
    for i in range(n):
        o = int(onset[i])
        d = int(offset[i]) - o
        base_lo, base_hi = 0, excerpt_end - d
        blocked = [
            (int(onset[j]) - d + 1, int(offset[j]) - 1)
            for j in by_pitch[int(pitch[i])]
            if j != i
        ]
        total = 0
        for wlo, whi in ((o - max_shift, o - min_shift), (o + min_shift, o + max_shift)):
            total += _subtract_blocked(max(wlo, base_lo), min(whi, base_hi), blocked)
        counts[i] = total
    return counts


def rasterize(
    pitch: np.ndarray,
    onset_frame: np.ndarray,
    offset_frame: np.ndarray,
    n_frames: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Presence and onset piano rolls, each (n_frames, 128) uint8."""
    presence = np.zeros((n_frames, 128), dtype=np.uint8)
    onsets = np.zeros((n_frames, 128), dtype=np.uint8)
    for i in range(len(pitch)):
        p = int(pitch[i])
        a = int(onset_frame[i])
        b = min(int(offset_frame[i]), n_frames)
        if a < n_frames:
            presence[a:b, p] = 1
            onsets[a, p] = 1
    return presence, onsets


def _build_adjacency(pitch_a, onset_a, pitch_b, onset_b, tol):
    order_b = np.argsort(onset_b, kind="stable")
    sorted_on_b = onset_b[order_b]
    adj: list[list[int]] = []
    for i in range(len(pitch_a)):
        lo = np.searchsorted(sorted_on_b, onset_a[i] - tol, side="left")
        hi = np.searchsorted(sorted_on_b, onset_a[i] + tol, side="right")
        adj.append(
            [int(order_b[j]) for j in range(lo, hi) if pitch_b[order_b[j]] == pitch_a[i]]
        )
    return adj


def onset_match_count(
    pitch_a: np.ndarray,
    onset_a: np.ndarray,
    pitch_b: np.ndarray,
    onset_b: np.ndarray,
    tol: int,
) -> int:
    """Maximum one-to-one matching size between the two note lists.

    Notes match when pitches are equal and onsets differ by at most tol.
    Kuhn's augmenting-path algorithm with an explicit stack.
    """
    adj = _build_adjacency(pitch_a, onset_a, pitch_b, onset_b, tol)
    match_b = [-1] * len(pitch_b)
    count = 0
    for a0 in range(len(pitch_a)):
        visited: set[int] = set()
        stack = [(a0, iter(adj[a0]))]
        parent: dict[int, int] = {}
        trail: dict[int, int | None] = {a0: None}
        augmented = False
        while stack and not augmented:
            a, it = stack[-1]
            advanced = False
            for b in it:
                if b in visited:
                    continue
                visited.add(b)
                parent[b] = a
                owner = match_b[b]
                if owner == -1:
                    node: int | None = b
                    while node is not None:
                        a2 = parent[node]
                        nxt = trail[a2]
                        match_b[node] = a2
                        node = nxt
                    augmented = True
                else:
                    trail[owner] = b
                    stack.append((owner, iter(adj[owner])))
                advanced = True
                break
            if not advanced:
                stack.pop()
        if augmented:
            count += 1
    return count
