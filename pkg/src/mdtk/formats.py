"""Model-input encodings: frame quantization, command tokens, piano rolls.

Excerpts are first quantized onto fixed-length frames (40 ms by default).
Two encodings are provided: a 356-token command sequence (note_on /
note_off per pitch plus frame shifts of 1-100) and a pair of binary piano
rolls (presence and onsets, 128 pitches wide each).  Frame-level labels
for locating a degradation are the rows where the two rolls differ.
"""
from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .core import Excerpt

__all__ = [
    "DEFAULT_FRAME_MS",
    "VOCAB_SIZE",
    "QuantizedNote",
    "QuantizedExcerpt",
    "PianoRollPair",
    "CommandDecodeError",
    "RollDecodeError",
    "quantize",
    "dequantize",
    "note_on_id",
    "note_off_id",
    "shift_id",
    "parse_token",
    "to_commands",
    "from_commands",
    "to_piano_roll",
    "from_piano_roll",
    "frame_labels",
    "write_roll",
    "read_roll",
    "write_commands_csv",
    "read_commands_csv",
]

DEFAULT_FRAME_MS = 40

N_PITCHES = 128
MAX_SHIFT = 100
VOCAB_SIZE = 2 * N_PITCHES + MAX_SHIFT  # 356

ROLL_MAGIC = b"MDTKROLL"


class CommandDecodeError(ValueError):
    """An undecodable command sequence; `index` is the offending token."""

    def __init__(self, message: str, index: int):
        self.index = index
        super().__init__(f"token {index}: {message}")


class RollDecodeError(ValueError):
    """An undecodable piano roll."""


def _frame(t: int, frame_ms: int) -> int:
    """Nearest frame boundary, half-up."""
    return (2 * t + frame_ms) // (2 * frame_ms)


@dataclass(frozen=True)
class QuantizedNote:
    """A note on the frame grid; offset > onset always holds."""

    pitch: int
    onset: int
    offset: int


class QuantizedExcerpt:
    """An excerpt rounded onto fixed frames, in canonical order."""

    __slots__ = ("frame_ms", "_notes")

    def __init__(self, notes: Iterable[QuantizedNote], frame_ms: int = DEFAULT_FRAME_MS):
        self.frame_ms = frame_ms
        self._notes = tuple(sorted(notes, key=lambda n: (n.onset, n.pitch, n.offset)))

    @property
    def notes(self) -> tuple[QuantizedNote, ...]:
        return self._notes

    @property
    def n_frames(self) -> int:
        return max((n.offset for n in self._notes), default=0)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        pitch = np.array([n.pitch for n in self._notes], dtype=np.int64)
        onset = np.array([n.onset for n in self._notes], dtype=np.int64)
        offset = np.array([n.offset for n in self._notes], dtype=np.int64)
        return pitch, onset, offset

    def __len__(self) -> int:
        return len(self._notes)

    def __iter__(self):
        return iter(self._notes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuantizedExcerpt):
            return NotImplemented
        return self.frame_ms == other.frame_ms and self._notes == other._notes

    def __hash__(self) -> int:
        return hash((self.frame_ms, self._notes))

    def __repr__(self) -> str:
        return f"QuantizedExcerpt({len(self._notes)} notes, {self.n_frames} frames)"


def dequantize(q: QuantizedExcerpt) -> Excerpt:
    """Map frame-grid notes back to milliseconds at the frame length."""
    from .core import Note

    return Excerpt(
        Note(n.pitch, n.onset * q.frame_ms, (n.offset - n.onset) * q.frame_ms)
        for n in q
    )


def quantize(excerpt: Excerpt, frame_ms: int = DEFAULT_FRAME_MS) -> QuantizedExcerpt:
    """Round note onsets and offsets to the nearest frame boundary.

    Notes that would quantize to zero length keep one frame instead of
    vanishing, so every degradation stays visible at frame scale.
    Quantizing twice is the same as quantizing once.
    """
    if frame_ms < 1:
        raise ValueError(f"frame_ms must be >= 1, got {frame_ms}")
    notes = []
    for n in excerpt:
        a = _frame(n.onset, frame_ms)
        b = _frame(n.offset, frame_ms)
        if b == a:
            b = a + 1
        notes.append(QuantizedNote(n.pitch, a, b))
    return QuantizedExcerpt(notes, frame_ms)


# ---------------------------------------------------------------------------
# Command sequences


def note_on_id(pitch: int) -> int:
    return pitch


def note_off_id(pitch: int) -> int:
    return N_PITCHES + pitch


def shift_id(frames: int) -> int:
    if not 1 <= frames <= MAX_SHIFT:
        raise ValueError(f"shift must be in [1, {MAX_SHIFT}], got {frames}")
    return 2 * N_PITCHES - 1 + frames


def parse_token(token: int) -> tuple[str, int]:
    """Token id -> (kind, argument); total over [0, 355]."""
    if 0 <= token < N_PITCHES:
        return "note_on", token
    if N_PITCHES <= token < 2 * N_PITCHES:
        return "note_off", token - N_PITCHES
    if 2 * N_PITCHES <= token < VOCAB_SIZE:
        return "shift", token - 2 * N_PITCHES + 1
    raise ValueError(f"token id out of range [0, {VOCAB_SIZE - 1}]: {token}")


def to_commands(q: QuantizedExcerpt) -> list[int]:
    """Encode as command tokens.

    Within each frame all note_off tokens come first, then all note_on
    tokens, each in ascending pitch; gaps between event frames become
    shift tokens, split into chunks of at most 100 frames.
    """
    events: dict[int, tuple[list[int], list[int]]] = {}
    for n in q:
        events.setdefault(n.onset, ([], []))[1].append(n.pitch)
        events.setdefault(n.offset, ([], []))[0].append(n.pitch)
    tokens: list[int] = []
    current = 0
    for frame in sorted(events):
        gap = frame - current
        while gap > 0:
            step = min(gap, MAX_SHIFT)
            tokens.append(shift_id(step))
            gap -= step
        offs, ons = events[frame]
        tokens.extend(note_off_id(p) for p in sorted(offs))
        tokens.extend(note_on_id(p) for p in sorted(ons))
        current = frame
    return tokens


def from_commands(
    tokens: Sequence[int], frame_ms: int = DEFAULT_FRAME_MS
) -> QuantizedExcerpt:
    """Decode command tokens back to a quantized excerpt.

    Raises
    ------
    CommandDecodeError
        On a note_off with no open note, a note_on for an already open
        pitch, a zero-length note, or notes left open at the end.
    """
    open_notes: dict[int, int] = {}
    notes: list[QuantizedNote] = []
    frame = 0
    for index, token in enumerate(tokens):
        try:
            kind, value = parse_token(token)
        except ValueError as exc:
            raise CommandDecodeError(str(exc), index)
        if kind == "shift":
            frame += value
        elif kind == "note_on":
            if value in open_notes:
                raise CommandDecodeError(f"note_on for already open pitch {value}", index)
            open_notes[value] = frame
        else:
            if value not in open_notes:
                raise CommandDecodeError(f"note_off with no open pitch {value}", index)
            start = open_notes.pop(value)
            if frame == start:
                raise CommandDecodeError(f"zero-length note at pitch {value}", index)
            notes.append(QuantizedNote(value, start, frame))
    if open_notes:
        pitch = sorted(open_notes)[0]
        raise CommandDecodeError(
            f"pitch {pitch} still open at end of sequence", len(tokens)
        )
    return QuantizedExcerpt(notes, frame_ms)


# ---------------------------------------------------------------------------
# Piano rolls


@dataclass(frozen=True)
class PianoRollPair:
    """Binary presence and onset rolls, each (frames, 128) uint8."""

    presence: np.ndarray
    onsets: np.ndarray

    def __post_init__(self):
        if self.presence.shape != self.onsets.shape:
            raise ValueError("presence and onset rolls must have equal shapes")
        if self.presence.ndim != 2 or self.presence.shape[1] != N_PITCHES:
            raise ValueError(f"rolls must be (frames, {N_PITCHES})")

    @property
    def n_frames(self) -> int:
        return self.presence.shape[0]

    def concatenated(self) -> np.ndarray:
        """Frame-wise concatenation, width 256."""
        return np.concatenate([self.presence, self.onsets], axis=1)


def to_piano_roll(q: QuantizedExcerpt, n_frames: int | None = None) -> PianoRollPair:
    """Rasterize into presence and onset rolls.

    A presence cell is set when a note sounds during the frame; an onset
    cell when a note begins there (so onsets are a subset of presence).
    """
    if n_frames is None:
        n_frames = q.n_frames
    pitch, onset, offset = q.arrays()
    presence, onsets = _kernels.rasterize(pitch, onset, offset, n_frames)
    return PianoRollPair(presence=presence, onsets=onsets)


def from_piano_roll(
    pair: PianoRollPair, frame_ms: int = DEFAULT_FRAME_MS
) -> QuantizedExcerpt:
    """Reconstruct notes from a roll pair.

    Presence runs are split at onset marks; a run that starts without an
    onset mark still begins a note.  Exact inverse of `to_piano_roll` for
    excerpts with no same-pitch frame overlap.

    Raises
    ------
    RollDecodeError
        If an onset cell has no matching presence cell.
    """
    bad = (pair.onsets == 1) & (pair.presence == 0)
    if bad.any():
        f, p = np.argwhere(bad)[0]
        raise RollDecodeError(f"onset without presence at frame {f}, pitch {p}")
    notes = []
    n_frames = pair.n_frames
    for p in range(N_PITCHES):
        presence = pair.presence[:, p]
        onsets = pair.onsets[:, p]
        if not presence.any():
            continue
        start: int | None = None
        for f in range(n_frames):
            if presence[f]:
                if start is None:
                    start = f
                elif onsets[f]:
                    notes.append(QuantizedNote(p, start, f))
                    start = f
            elif start is not None:
                notes.append(QuantizedNote(p, start, f))
                start = None
        if start is not None:
            notes.append(QuantizedNote(p, start, n_frames))
    return QuantizedExcerpt(notes, frame_ms)


def frame_labels(
    clean: Excerpt, degraded: Excerpt, frame_ms: int = DEFAULT_FRAME_MS
) -> np.ndarray:
    """Per-frame binary labels marking where the two excerpts differ.

    A frame is labeled 1 when the width-256 concatenated roll rows of the
    quantized excerpts differ there; the vector spans the longer of the
    two.  Symmetric in its arguments.
    """
    q_clean = quantize(clean, frame_ms)
    q_degraded = quantize(degraded, frame_ms)
    n = max(q_clean.n_frames, q_degraded.n_frames)
    roll_clean = to_piano_roll(q_clean, n_frames=n).concatenated()
    roll_degraded = to_piano_roll(q_degraded, n_frames=n).concatenated()
    return (roll_clean != roll_degraded).any(axis=1).astype(np.uint8)


# ---------------------------------------------------------------------------
# On-disk encodings


def write_roll(pair: PianoRollPair, path: str | Path) -> None:
    """Write the concatenated roll as packed bits.

    Layout: 16-byte header (magic "MDTKROLL", frame count u32, width u32,
    little-endian) then one row of width/8 bytes per frame, bits packed
    little-endian within each byte.
    """
    concat = pair.concatenated()
    n_frames, width = concat.shape
    packed = np.packbits(concat, axis=1, bitorder="little")
    with open(path, "wb") as handle:
        handle.write(ROLL_MAGIC)
        handle.write(struct.pack("<II", n_frames, width))
        handle.write(packed.tobytes())


def read_roll(path: str | Path) -> PianoRollPair:
    """Read a packed-bit roll file written by `write_roll`."""
    data = Path(path).read_bytes()
    if data[:8] != ROLL_MAGIC:
        raise RollDecodeError("bad magic; not a roll file")
    n_frames, width = struct.unpack("<II", data[8:16])
    if width != 2 * N_PITCHES:
        raise RollDecodeError(f"unsupported roll width {width}")
    row_bytes = width // 8
    body = np.frombuffer(data[16:], dtype=np.uint8)
    if len(body) != n_frames * row_bytes:
        raise RollDecodeError(
            f"expected {n_frames * row_bytes} body bytes, got {len(body)}"
        )
    rows = np.unpackbits(
        body.reshape(n_frames, row_bytes), axis=1, count=width, bitorder="little"
    )
    return PianoRollPair(
        presence=np.ascontiguousarray(rows[:, :N_PITCHES]),
        onsets=np.ascontiguousarray(rows[:, N_PITCHES:]),
    )


def write_commands_csv(tokens: Sequence[int], path: str | Path) -> None:
    """One command id per row under a `command_id` header."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(("command_id",))
        for token in tokens:
            writer.writerow((token,))


def read_commands_csv(path: str | Path) -> list[int]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["command_id"]:
            raise ValueError(f"expected header command_id, got {header}")
        return [int(row[0]) for row in reader if row]
