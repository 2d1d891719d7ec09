"""Note/excerpt data model, CSV ingestion, and preprocessing primitives.

An :class:`Excerpt` is an immutable, canonically ordered collection of
:class:`Note` values; every operation in the library consumes and returns
canonical excerpts.  Times are integer milliseconds throughout.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

__all__ = [
    "Note",
    "Excerpt",
    "CorpusItem",
    "CsvParseError",
    "load_csv",
    "write_csv",
    "flatten_tracks",
    "fix_overlaps",
    "CSV_HEADER",
]

CSV_HEADER = ("onset", "track", "pitch", "dur")


class CsvParseError(ValueError):
    """A malformed note CSV; `line` is the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, slots=True)
class Note:
    """A single pitched event.

    Attributes
    ----------
    pitch : int
        MIDI pitch, 0-127 (C4 = 60).
    onset : int
        Onset time in milliseconds, >= 0.
    dur : int
        Duration in milliseconds, >= 1.
    track : int
        Track index, >= 0.
    """

    pitch: int
    onset: int
    dur: int
    track: int = 0

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch must be in [0, 127], got {self.pitch}")
        if self.onset < 0:
            raise ValueError(f"onset must be >= 0, got {self.onset}")
        if self.dur < 1:
            raise ValueError(f"dur must be >= 1, got {self.dur}")
        if self.track < 0:
            raise ValueError(f"track must be >= 0, got {self.track}")

    @property
    def offset(self) -> int:
        """End time in milliseconds (onset + dur; never stored)."""
        return self.onset + self.dur


def _canonical_key(note: Note) -> tuple[int, int, int, int]:
    return (note.onset, note.pitch, note.dur, note.track)


class Excerpt:
    """An ordered collection of notes spanning [0, max offset].

    Notes are sorted by (onset, pitch, dur, track) on construction and the
    instance is immutable afterwards, so excerpts are safe to share.
    """

    __slots__ = ("_notes", "_arrays")

    def __init__(self, notes: Iterable[Note] = ()):
        self._notes: tuple[Note, ...] = tuple(sorted(notes, key=_canonical_key))
        self._arrays = None

    @property
    def notes(self) -> tuple[Note, ...]:
        return self._notes

    @property
    def max_offset(self) -> int:
        """End of the excerpt's time range (0 when empty)."""
        return max((n.offset for n in self._notes), default=0)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(pitch, onset, offset, track) int64 arrays in canonical order.

        Cached; callers must not mutate the returned arrays.
        """
        if self._arrays is None:
            n = len(self._notes)
            pitch = np.empty(n, dtype=np.int64)
            onset = np.empty(n, dtype=np.int64)
            offset = np.empty(n, dtype=np.int64)
            track = np.empty(n, dtype=np.int64)
            for i, note in enumerate(self._notes):
                pitch[i] = note.pitch
                onset[i] = note.onset
                offset[i] = note.onset + note.dur
                track[i] = note.track
            self._arrays = (pitch, onset, offset, track)
        return self._arrays

    def __len__(self) -> int:
        return len(self._notes)

    def __iter__(self) -> Iterator[Note]:
        return iter(self._notes)

    def __getitem__(self, i):
        return self._notes[i]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Excerpt):
            return NotImplemented
        return self._notes == other._notes

    def __hash__(self) -> int:
        return hash(self._notes)

    def __repr__(self) -> str:
        return f"Excerpt({len(self._notes)} notes, span [0, {self.max_offset}))"


@dataclass(frozen=True)
class CorpusItem:
    """An excerpt together with the identifier of its source file."""

    source_id: str
    excerpt: Excerpt


def load_csv(path: str | Path) -> Excerpt:
    """Read an excerpt from a note CSV.

    The file must start with the exact header ``onset,track,pitch,dur``
    and every row must hold four integers.  Rows may appear in any order;
    the returned excerpt is canonically sorted.

    Raises
    ------
    CsvParseError
        On a missing/odd header or any malformed row, with the 1-based
        line number.
    """
    notes = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError("empty file, expected header onset,track,pitch,dur", 1)
        if tuple(header) != CSV_HEADER:
            raise CsvParseError(
                f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}", 1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise CsvParseError(f"expected 4 columns, got {len(row)}", lineno)
            try:
                onset, track, pitch, dur = (int(field) for field in row)
            except ValueError:
                raise CsvParseError(f"non-integer field in row {row!r}", lineno)
            try:
                notes.append(Note(pitch=pitch, onset=onset, dur=dur, track=track))
            except ValueError as exc:
                raise CsvParseError(str(exc), lineno)
    return Excerpt(notes)


def write_csv(excerpt: Excerpt, path: str | Path) -> None:
    """Write an excerpt as a note CSV (UTF-8, LF line endings).

    ``load_csv(write_csv(e)) == e`` for any excerpt ``e``.
    """
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for note in excerpt:
            writer.writerow((note.onset, note.track, note.pitch, note.dur))


def flatten_tracks(excerpt: Excerpt) -> Excerpt:
    """Move every note to track 0, leaving pitches and times unchanged."""
    return Excerpt(
        Note(pitch=n.pitch, onset=n.onset, dur=n.dur, track=0) for n in excerpt
    )


def fix_overlaps(excerpt: Excerpt) -> Excerpt:
    """Resolve same-pitch, same-track overlaps.

    For each overlapping pair (earlier note first), the first note is cut
    at the onset of the second and the second note's offset becomes the
    maximum of the two original offsets, so no sustain is lost.  A note
    cut to zero length is dropped.  The result contains no same-pitch,
    same-track overlapping pair.
    """
    groups: dict[tuple[int, int], list[Note]] = {}
    for note in excerpt:
        groups.setdefault((note.pitch, note.track), []).append(note)

    fixed: list[Note] = []
    for notes in groups.values():
        kept: list[Note] = []
        for cur in notes:  # already canonical within the group
            if kept and kept[-1].offset > cur.onset:
                prev = kept.pop()
                merged_offset = max(prev.offset, cur.offset)
                cut_dur = cur.onset - prev.onset
                if cut_dur >= 1:
                    kept.append(
                        Note(prev.pitch, prev.onset, cut_dur, prev.track)
                    )
                cur = Note(cur.pitch, cur.onset, merged_offset - cur.onset, cur.track)
            kept.append(cur)
        fixed.extend(kept)
    return Excerpt(fixed)
