"""The eight degradation functions: controlled single-error edits of an excerpt.

Every degradation takes a canonical excerpt plus a :class:`RandomSource`
and returns a :class:`DegradationOutcome`, or ``None`` (with a logged
warning) when no valid application exists.  Results stay inside the input
excerpt's time range and never introduce a same-pitch overlap.

Sampling happens in two fixed stages so that inapplicability is exact and
distributions are testable: first the target note is chosen uniformly
among notes with at least one feasible outcome, then the outcome is drawn
uniformly (or by the configured weights) over that note's feasible set.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, fields

from . import _kernels
from .core import Excerpt, Note
from .rng import RandomSource

__all__ = [
    "DEGRADATION_IDS",
    "NO_DEGRADATION",
    "LABELS",
    "DEGRADATIONS",
    "DegradationOutcome",
    "DegradationParams",
    "pitch_shift",
    "onset_shift",
    "offset_shift",
    "time_shift",
    "add_note",
    "remove_note",
    "split_note",
    "join_notes",
]

logger = logging.getLogger(__name__)

DEGRADATION_IDS = (
    "pitch_shift",
    "onset_shift",
    "offset_shift",
    "time_shift",
    "add_note",
    "remove_note",
    "split_note",
    "join_notes",
)
NO_DEGRADATION = "none"
LABELS = DEGRADATION_IDS + (NO_DEGRADATION,)

MIN_PITCH_DEFAULT = 21
MAX_PITCH_DEFAULT = 108
MIN_SHIFT_DEFAULT = 50
MIN_DUR_DEFAULT = 50
MAX_GAP_DEFAULT = 50

_NO_BOUND = _kernels.NO_BOUND


@dataclass(frozen=True)
class DegradationOutcome:
    """A degraded excerpt plus the label and exact change set.

    ``excerpt`` equals the input with ``changed_before`` removed and
    ``changed_after`` inserted; both sets are empty for label ``none``.
    """

    excerpt: Excerpt
    label: str
    changed_before: frozenset[Note] = frozenset()
    changed_after: frozenset[Note] = frozenset()


@dataclass(frozen=True)
class DegradationParams:
    """Parameter bundle covering all eight degradations.

    Only the fields a given degradation understands are passed to it; see
    :meth:`kwargs_for`.
    """

    min_pitch: int = MIN_PITCH_DEFAULT
    max_pitch: int = MAX_PITCH_DEFAULT
    interval_weights: dict[int, float] | None = None
    align_pitch: bool = False
    align_onset: bool = False
    align_dur: bool = False
    min_shift_ms: int = MIN_SHIFT_DEFAULT
    max_shift_ms: int | None = None
    min_dur_ms: int = MIN_DUR_DEFAULT
    max_dur_ms: int | None = None
    num_splits: int = 1
    max_gap_ms: int = MAX_GAP_DEFAULT

    def __post_init__(self):
        if not 0 <= self.min_pitch <= self.max_pitch <= 127:
            raise ValueError(
                f"need 0 <= min_pitch <= max_pitch <= 127, "
                f"got [{self.min_pitch}, {self.max_pitch}]"
            )
        if self.min_shift_ms < 1:
            raise ValueError(f"min_shift_ms must be >= 1, got {self.min_shift_ms}")
        if self.max_shift_ms is not None and self.max_shift_ms < self.min_shift_ms:
            raise ValueError("max_shift_ms < min_shift_ms")
        if self.min_dur_ms < 1:
            raise ValueError(f"min_dur_ms must be >= 1, got {self.min_dur_ms}")
        if self.max_dur_ms is not None and self.max_dur_ms < self.min_dur_ms:
            raise ValueError("max_dur_ms < min_dur_ms")
        if self.num_splits < 1:
            raise ValueError(f"num_splits must be >= 1, got {self.num_splits}")
        if self.max_gap_ms < 0:
            raise ValueError(f"max_gap_ms must be >= 0, got {self.max_gap_ms}")
        if self.interval_weights is not None:
            if any(w < 0 for w in self.interval_weights.values()):
                raise ValueError("interval weights must be nonnegative")
            if not any(w > 0 for w in self.interval_weights.values()):
                raise ValueError("interval weights must not all be zero")

    def kwargs_for(self, name: str) -> dict:
        """The keyword arguments accepted by degradation `name`."""
        accepted = _ACCEPTED_PARAMS[name]
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name in accepted}


_ACCEPTED_PARAMS = {
    "pitch_shift": {"min_pitch", "max_pitch", "interval_weights", "align_pitch"},
    "onset_shift": {
        "min_shift_ms", "max_shift_ms", "min_dur_ms", "max_dur_ms",
        "align_onset", "align_dur",
    },
    "offset_shift": {"min_shift_ms", "max_shift_ms", "min_dur_ms", "max_dur_ms", "align_dur"},
    "time_shift": {"min_shift_ms", "max_shift_ms", "align_onset"},
    "add_note": {
        "min_pitch", "max_pitch", "min_dur_ms", "max_dur_ms",
        "align_pitch", "align_onset", "align_dur",
    },
    "remove_note": set(),
    "split_note": {"min_dur_ms", "num_splits"},
    "join_notes": {"max_gap_ms"},
}


def _inapplicable(name: str, reason: str) -> None:
    logger.warning("%s is inapplicable: %s; returning None", name, reason)
    return None


def _replace(excerpt: Excerpt, index: int, new_notes: list[Note], label: str) -> DegradationOutcome:
    old = excerpt[index]
    notes = list(excerpt.notes)
    del notes[index]
    notes.extend(new_notes)
    return DegradationOutcome(
        excerpt=Excerpt(notes),
        label=label,
        changed_before=frozenset([old]),
        changed_after=frozenset(new_notes),
    )


def _interval_total(intervals: list[tuple[int, int]]) -> int:
    return sum(hi - lo + 1 for lo, hi in intervals if hi >= lo)


def _sample_intervals(intervals: list[tuple[int, int]], rng: RandomSource) -> int:
    """Uniformly pick one integer from a disjoint union of [lo, hi] ranges."""
    k = rng.integer(_interval_total(intervals))
    for lo, hi in intervals:
        size = hi - lo + 1
        if size <= 0:
            continue
        if k < size:
            return lo + k
        k -= size
    raise AssertionError("interval sampling index out of range")


def _clip(lo: int, hi: int, a: int, b: int) -> tuple[int, int]:
    return (max(lo, a), min(hi, b))


def _shift_windows(center: int, min_shift: int, max_shift: int | None) -> list[tuple[int, int]]:
    hi_shift = _NO_BOUND if max_shift is None else max_shift
    return [
        (center - hi_shift, center - min_shift),
        (center + min_shift, center + hi_shift),
    ]


def _subtract_intervals(
    window: tuple[int, int], blocked: list[tuple[int, int]]
) -> list[tuple[int, int]]:
    """window minus the union of blocked ranges, as disjoint pieces."""
    lo, hi = window
    pieces = []
    for blo, bhi in sorted(blocked):
        if bhi < blo or bhi < lo:
            continue
        if blo > hi:
            break
        if blo > lo:
            pieces.append((lo, blo - 1))
        lo = max(lo, bhi + 1)
        if lo > hi:
            break
    if lo <= hi:
        pieces.append((lo, hi))
    return [p for p in pieces if p[1] >= p[0]]


def _distinct(values) -> list[int]:
    return sorted(set(values))


# ---------------------------------------------------------------------------
# pitch_shift


def _pitch_candidates(
    excerpt: Excerpt,
    index: int,
    min_pitch: int,
    max_pitch: int,
    interval_weights: dict[int, float] | None,
    align_pitch: bool,
) -> list[int]:
    note = excerpt[index]
    if interval_weights is not None:
        base = {note.pitch + iv for iv, w in interval_weights.items() if w > 0}
    else:
        base = set(range(min_pitch, max_pitch + 1))
    if align_pitch:
        base &= {n.pitch for j, n in enumerate(excerpt) if j != index}
    base.discard(note.pitch)
    blocked = {
        n.pitch
        for j, n in enumerate(excerpt)
        if j != index and n.onset < note.offset and n.offset > note.onset
    }
    return sorted(
        p for p in base if min_pitch <= p <= max_pitch and p not in blocked
    )


def pitch_shift(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    min_pitch: int = MIN_PITCH_DEFAULT,
    max_pitch: int = MAX_PITCH_DEFAULT,
    interval_weights: dict[int, float] | None = None,
    align_pitch: bool = False,
) -> DegradationOutcome | None:
    """Change the pitch of one random note.

    The new pitch is drawn uniformly from [min_pitch, max_pitch] excluding
    the old pitch, or by `interval_weights` (signed interval -> weight)
    around the old pitch.  With `align_pitch` the new pitch must equal
    some other note's pitch.  Pitches that would create a same-pitch
    overlap are excluded before sampling.
    """
    if len(excerpt) == 0:
        return _inapplicable("pitch_shift", "the excerpt has no notes")
    if interval_weights is None and not align_pitch:
        pitch, onset, offset, _ = excerpt.arrays()
        counts = _kernels.pitch_shift_counts(pitch, onset, offset, min_pitch, max_pitch)
        feasible = [i for i in range(len(excerpt)) if counts[i] > 0]
    else:
        feasible = [
            i
            for i in range(len(excerpt))
            if _pitch_candidates(excerpt, i, min_pitch, max_pitch,
                                 interval_weights, align_pitch)
        ]
    if not feasible:
        return _inapplicable("pitch_shift", "no note has a valid new pitch")
    index = feasible[rng.integer(len(feasible))]
    note = excerpt[index]
    candidates = _pitch_candidates(
        excerpt, index, min_pitch, max_pitch, interval_weights, align_pitch
    )
    if interval_weights is not None:
        weights = [interval_weights[p - note.pitch] for p in candidates]
        new_pitch = candidates[rng.weighted_index(weights)]
    else:
        new_pitch = candidates[rng.integer(len(candidates))]
    return _replace(
        excerpt, index, [Note(new_pitch, note.onset, note.dur, note.track)], "pitch_shift"
    )


# ---------------------------------------------------------------------------
# onset_shift / offset_shift / time_shift


def _onset_bounds(excerpt: Excerpt, index: int, min_dur: int, max_dur: int | None):
    note = excerpt[index]
    lo = 0 if max_dur is None else max(0, note.offset - max_dur)
    for j, other in enumerate(excerpt):
        if j != index and other.pitch == note.pitch and other.onset < note.offset:
            lo = max(lo, other.offset)
    return lo, note.offset - min_dur


def _onset_candidates(
    excerpt, index, min_shift, max_shift, min_dur, max_dur, align_onset, align_dur
):
    """Candidate new onsets for one note: interval pieces or aligned values."""
    note = excerpt[index]
    lo, hi = _onset_bounds(excerpt, index, min_dur, max_dur)
    windows = [_clip(lo, hi, a, b) for a, b in _shift_windows(note.onset, min_shift, max_shift)]
    if not align_onset and not align_dur:
        return [w for w in windows if w[1] >= w[0]], None

    def ok(o2: int) -> bool:
        return any(a <= o2 <= b for a, b in windows)

    if align_onset:
        values = {n.onset for n in excerpt}
        if align_dur:
            values &= {note.offset - n.dur for n in excerpt}
    else:
        values = {note.offset - n.dur for n in excerpt}
    return None, sorted(v for v in values if ok(v))


def onset_shift(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    min_shift_ms: int = MIN_SHIFT_DEFAULT,
    max_shift_ms: int | None = None,
    min_dur_ms: int = MIN_DUR_DEFAULT,
    max_dur_ms: int | None = None,
    align_onset: bool = False,
    align_dur: bool = False,
) -> DegradationOutcome | None:
    """Move one note's onset, leaving its offset unchanged.

    The shift magnitude lies in [min_shift_ms, max_shift_ms], the
    resulting duration in [min_dur_ms, max_dur_ms], and the new onset is
    never negative.  `align_onset` restricts the new onset to existing
    onset values; `align_dur` restricts the new duration to existing
    duration values.
    """
    if len(excerpt) == 0:
        return _inapplicable("onset_shift", "the excerpt has no notes")
    aligned = align_onset or align_dur
    if not aligned:
        pitch, onset, offset, _ = excerpt.arrays()
        counts = _kernels.onset_shift_counts(
            pitch, onset, offset,
            min_shift_ms, _NO_BOUND if max_shift_ms is None else max_shift_ms,
            min_dur_ms, _NO_BOUND if max_dur_ms is None else max_dur_ms,
        )
        feasible = [i for i in range(len(excerpt)) if counts[i] > 0]
    else:
        feasible = []
        for i in range(len(excerpt)):
            _, values = _onset_candidates(
                excerpt, i, min_shift_ms, max_shift_ms, min_dur_ms, max_dur_ms,
                align_onset, align_dur,
            )
            if values:
                feasible.append(i)
    if not feasible:
        return _inapplicable("onset_shift", "no note has a valid shifted onset")
    index = feasible[rng.integer(len(feasible))]
    intervals, values = _onset_candidates(
        excerpt, index, min_shift_ms, max_shift_ms, min_dur_ms, max_dur_ms,
        align_onset, align_dur,
    )
    new_onset = (
        _sample_intervals(intervals, rng)
        if not aligned
        else values[rng.integer(len(values))]
    )
    note = excerpt[index]
    new = Note(note.pitch, new_onset, note.offset - new_onset, note.track)
    return _replace(excerpt, index, [new], "onset_shift")


def _offset_bounds(excerpt: Excerpt, index: int, min_dur: int, max_dur: int | None):
    note = excerpt[index]
    hi = excerpt.max_offset if max_dur is None else min(
        excerpt.max_offset, note.onset + max_dur
    )
    for j, other in enumerate(excerpt):
        if j != index and other.pitch == note.pitch and other.offset > note.onset:
            hi = min(hi, other.onset)
    return note.onset + min_dur, hi


def _offset_candidates(excerpt, index, min_shift, max_shift, min_dur, max_dur, align_dur):
    note = excerpt[index]
    lo, hi = _offset_bounds(excerpt, index, min_dur, max_dur)
    windows = [_clip(lo, hi, a, b) for a, b in _shift_windows(note.offset, min_shift, max_shift)]
    if not align_dur:
        return [w for w in windows if w[1] >= w[0]], None
    values = {note.onset + n.dur for n in excerpt}
    return None, sorted(v for v in values if any(a <= v <= b for a, b in windows))


def offset_shift(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    min_shift_ms: int = MIN_SHIFT_DEFAULT,
    max_shift_ms: int | None = None,
    min_dur_ms: int = MIN_DUR_DEFAULT,
    max_dur_ms: int | None = None,
    align_dur: bool = False,
) -> DegradationOutcome | None:
    """Move one note's offset, leaving its onset unchanged.

    The new offset stays within the excerpt's original time range.
    `align_dur` restricts the new duration to existing duration values.
    """
    if len(excerpt) == 0:
        return _inapplicable("offset_shift", "the excerpt has no notes")
    if not align_dur:
        pitch, onset, offset, _ = excerpt.arrays()
        counts = _kernels.offset_shift_counts(
            pitch, onset, offset, excerpt.max_offset,
            min_shift_ms, _NO_BOUND if max_shift_ms is None else max_shift_ms,
            min_dur_ms, _NO_BOUND if max_dur_ms is None else max_dur_ms,
        )
        feasible = [i for i in range(len(excerpt)) if counts[i] > 0]
    else:
        feasible = []
        for i in range(len(excerpt)):
            _, values = _offset_candidates(
                excerpt, i, min_shift_ms, max_shift_ms, min_dur_ms, max_dur_ms, True
            )
            if values:
                feasible.append(i)
    if not feasible:
        return _inapplicable("offset_shift", "no note has a valid shifted offset")
    index = feasible[rng.integer(len(feasible))]
    intervals, values = _offset_candidates(
        excerpt, index, min_shift_ms, max_shift_ms, min_dur_ms, max_dur_ms, align_dur
    )
    new_offset = (
        _sample_intervals(intervals, rng)
        if not align_dur
        else values[rng.integer(len(values))]
    )
    note = excerpt[index]
    new = Note(note.pitch, note.onset, new_offset - note.onset, note.track)
    return _replace(excerpt, index, [new], "offset_shift")


def _time_shift_pieces(excerpt, index, min_shift, max_shift):
    note = excerpt[index]
    end = excerpt.max_offset
    d = note.dur
    blocked = [
        (n.onset - d + 1, n.offset - 1)
        for j, n in enumerate(excerpt)
        if j != index and n.pitch == note.pitch
    ]
    pieces = []
    for a, b in _shift_windows(note.onset, min_shift, max_shift):
        window = _clip(0, end - d, a, b)
        if window[1] >= window[0]:
            pieces.extend(_subtract_intervals(window, blocked))
    return pieces


def time_shift(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    min_shift_ms: int = MIN_SHIFT_DEFAULT,
    max_shift_ms: int | None = None,
    align_onset: bool = False,
) -> DegradationOutcome | None:
    """Translate one note in time, leaving its duration unchanged.

    The note stays inside [0, original max offset].  `align_onset`
    restricts the new onset to existing onset values.
    """
    if len(excerpt) == 0:
        return _inapplicable("time_shift", "the excerpt has no notes")
    if not align_onset:
        pitch, onset, offset, _ = excerpt.arrays()
        counts = _kernels.time_shift_counts(
            pitch, onset, offset, excerpt.max_offset,
            min_shift_ms, _NO_BOUND if max_shift_ms is None else max_shift_ms,
        )
        feasible = [i for i in range(len(excerpt)) if counts[i] > 0]
        if not feasible:
            return _inapplicable("time_shift", "no note has room to move")
        index = feasible[rng.integer(len(feasible))]
        new_onset = _sample_intervals(
            _time_shift_pieces(excerpt, index, min_shift_ms, max_shift_ms), rng
        )
    else:
        onsets = {n.onset for n in excerpt}
        per_note = []
        for i in range(len(excerpt)):
            pieces = _time_shift_pieces(excerpt, i, min_shift_ms, max_shift_ms)
            per_note.append(
                sorted(o for o in onsets if any(lo <= o <= hi for lo, hi in pieces))
            )
        feasible = [i for i, v in enumerate(per_note) if v]
        if not feasible:
            return _inapplicable("time_shift", "no note has an aligned position")
        index = feasible[rng.integer(len(feasible))]
        values = per_note[index]
        new_onset = values[rng.integer(len(values))]
    note = excerpt[index]
    new = Note(note.pitch, new_onset, note.dur, note.track)
    return _replace(excerpt, index, [new], "time_shift")


# ---------------------------------------------------------------------------
# add_note / remove_note


def _next_same_pitch_onset(excerpt: Excerpt, pitch: int, after: int) -> int | None:
    nxt = None
    for n in excerpt:
        if n.pitch == pitch and n.onset > after:
            nxt = n.onset if nxt is None else min(nxt, n.onset)
    return nxt


def _add_feasible_onsets(
    excerpt: Excerpt,
    pitch: int,
    eff_min_dur: int,
    align_onset: bool,
) -> tuple[list[tuple[int, int]] | None, list[int] | None]:
    """Where a note of `pitch` needing `eff_min_dur` ms of room can start."""
    end = excerpt.max_offset
    blocked = [
        (n.onset - eff_min_dur + 1, n.offset - 1)
        for n in excerpt
        if n.pitch == pitch
    ]
    window = (0, end - eff_min_dur)
    if align_onset:
        values = sorted(
            o
            for o in {n.onset for n in excerpt}
            if window[0] <= o <= window[1]
            and not any(lo <= o <= hi for lo, hi in blocked)
        )
        return None, values
    return _subtract_intervals(window, blocked), None


def add_note(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    min_pitch: int = MIN_PITCH_DEFAULT,
    max_pitch: int = MAX_PITCH_DEFAULT,
    min_dur_ms: int = MIN_DUR_DEFAULT,
    max_dur_ms: int | None = None,
    align_pitch: bool = False,
    align_onset: bool = False,
    align_dur: bool = False,
) -> DegradationOutcome | None:
    """Add one new note inside the excerpt's existing time range.

    Pitch is drawn from [min_pitch, max_pitch], onset uniformly from
    [0, max_offset - min_dur_ms], and duration uniformly from
    [min_dur_ms, max_offset - onset]; a sampled note that would overlap a
    same-pitch note is shortened to end at that note's onset.  The align
    flags restrict pitch/onset/duration to values present in the excerpt.
    When the excerpt is empty or shorter than min_dur_ms, the note is
    placed at onset 0 with duration min_dur_ms (the one case where the
    result may extend the time range).
    """
    end = excerpt.max_offset
    durs = _distinct(n.dur for n in excerpt)
    if align_pitch:
        pitch_pool = _distinct(
            n.pitch for n in excerpt if min_pitch <= n.pitch <= max_pitch
        )
    else:
        pitch_pool = list(range(min_pitch, max_pitch + 1))

    if end < min_dur_ms:
        # Degenerate range: fixed placement at the excerpt start.
        onset, dur = 0, min_dur_ms
        if align_onset and onset not in {n.onset for n in excerpt}:
            return _inapplicable("add_note", "no aligned onset in a degenerate range")
        if align_dur and dur not in durs:
            return _inapplicable("add_note", "no aligned duration in a degenerate range")
        pool = [
            p
            for p in pitch_pool
            if not any(n.pitch == p and n.onset < dur for n in excerpt)
        ]
        if not pool:
            return _inapplicable("add_note", "every pitch collides in a degenerate range")
        new = Note(pool[rng.integer(len(pool))], onset, dur, 0)
        return DegradationOutcome(
            excerpt=Excerpt(list(excerpt.notes) + [new]),
            label="add_note",
            changed_after=frozenset([new]),
        )

    if align_dur:
        dur_pool_all = [
            d for d in durs
            if d >= min_dur_ms and (max_dur_ms is None or d <= max_dur_ms)
        ]
        if not dur_pool_all:
            return _inapplicable("add_note", "no existing duration fits the bounds")
        eff_min_dur = dur_pool_all[0]
    else:
        eff_min_dur = min_dur_ms

    pool = list(pitch_pool)
    while pool:
        k = rng.integer(len(pool))
        p = pool[k]
        intervals, values = _add_feasible_onsets(excerpt, p, eff_min_dur, align_onset)
        if align_onset:
            if not values:
                del pool[k]
                continue
            onset = values[rng.integer(len(values))]
        else:
            if _interval_total(intervals) == 0:
                del pool[k]
                continue
            onset = _sample_intervals(intervals, rng)
        nxt = _next_same_pitch_onset(excerpt, p, onset)
        room = end - onset if nxt is None else min(nxt - onset, end - onset)
        if align_dur:
            # No shrinking in aligned mode: only durations that fit qualify.
            dur_pool = [d for d in dur_pool_all if d <= room]
            dur = dur_pool[rng.integer(len(dur_pool))]
        else:
            hi = end - onset if max_dur_ms is None else min(max_dur_ms, end - onset)
            dur = min_dur_ms + rng.integer(hi - min_dur_ms + 1)
            if dur > room:
                dur = room  # shrink to abut the next same-pitch note
        new = Note(p, onset, dur, 0)
        return DegradationOutcome(
            excerpt=Excerpt(list(excerpt.notes) + [new]),
            label="add_note",
            changed_after=frozenset([new]),
        )
    return _inapplicable("add_note", "no pitch admits a valid placement")


def remove_note(excerpt: Excerpt, rng: RandomSource) -> DegradationOutcome | None:
    """Delete one uniformly chosen note."""
    if len(excerpt) == 0:
        return _inapplicable("remove_note", "the excerpt has no notes")
    index = rng.integer(len(excerpt))
    old = excerpt[index]
    notes = list(excerpt.notes)
    del notes[index]
    return DegradationOutcome(
        excerpt=Excerpt(notes),
        label="remove_note",
        changed_before=frozenset([old]),
    )


# ---------------------------------------------------------------------------
# split_note / join_notes


def split_note(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    min_dur_ms: int = MIN_DUR_DEFAULT,
    num_splits: int = 1,
) -> DegradationOutcome | None:
    """Split one note into num_splits + 1 abutting notes of the same pitch.

    The first piece keeps the original onset, the last keeps the original
    offset, every piece lasts at least min_dur_ms, and the split points
    are drawn uniformly over all valid configurations.
    """
    k = num_splits
    pieces_needed = (k + 1) * min_dur_ms
    feasible = [i for i, n in enumerate(excerpt) if n.dur >= pieces_needed]
    if not feasible:
        return _inapplicable(
            "split_note", f"no note is long enough for {k + 1} pieces of {min_dur_ms} ms"
        )
    index = feasible[rng.integer(len(feasible))]
    note = excerpt[index]
    slack = note.dur - pieces_needed
    # Stars and bars: a sorted k-subset of [1, slack + k] determines the
    # extra length of each piece, uniformly over all valid splits.
    bars = [int(s) + 1 for s in rng.subset(slack + k, k)]
    extras = []
    prev = 0
    for j, s in enumerate(bars):
        extras.append(s - prev - 1)
        prev = s
    extras.append(slack + k - prev)
    pieces = []
    at = note.onset
    for extra in extras:
        dur = min_dur_ms + extra
        pieces.append(Note(note.pitch, at, dur, note.track))
        at += dur
    return _replace(excerpt, index, pieces, "split_note")


def join_notes(
    excerpt: Excerpt,
    rng: RandomSource,
    *,
    max_gap_ms: int = MAX_GAP_DEFAULT,
) -> DegradationOutcome | None:
    """Join a run of consecutive same-pitch notes into one note.

    A run is a maximal sequence of same-pitch notes whose inter-note gaps
    are all at most max_gap_ms; the whole run is replaced by a note from
    the first onset to the last offset.  The run is chosen uniformly over
    all maximal runs of length >= 2.
    """
    groups: dict[int, list[int]] = {}
    for i, n in enumerate(excerpt):
        groups.setdefault(n.pitch, []).append(i)
    runs: list[list[int]] = []
    for pitch in sorted(groups):
        indices = groups[pitch]
        run = [indices[0]]
        for i in indices[1:]:
            if excerpt[i].onset - excerpt[run[-1]].offset <= max_gap_ms:
                run.append(i)
            else:
                if len(run) >= 2:
                    runs.append(run)
                run = [i]
        if len(run) >= 2:
            runs.append(run)
    if not runs:
        return _inapplicable(
            "join_notes", f"no same-pitch run with gaps <= {max_gap_ms} ms"
        )
    run = runs[rng.integer(len(runs))]
    first = excerpt[run[0]]
    joined = Note(
        first.pitch, first.onset, excerpt[run[-1]].offset - first.onset, first.track
    )
    run_set = set(run)
    remaining = [n for i, n in enumerate(excerpt) if i not in run_set]
    return DegradationOutcome(
        excerpt=Excerpt(remaining + [joined]),
        label="join_notes",
        changed_before=frozenset(excerpt[i] for i in run),
        changed_after=frozenset([joined]),
    )


DEGRADATIONS = {
    "pitch_shift": pitch_shift,
    "onset_shift": onset_shift,
    "offset_shift": offset_shift,
    "time_shift": time_shift,
    "add_note": add_note,
    "remove_note": remove_note,
    "split_note": split_note,
    "join_notes": join_notes,
}
