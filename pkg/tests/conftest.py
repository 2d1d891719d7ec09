"""Shared helpers: random excerpt generation and raw SMF construction."""
from __future__ import annotations

import numpy as np
import pytest

from mdtk.core import Excerpt, Note


def random_excerpt(
    gen: np.random.Generator,
    n_notes: int = 12,
    pitch_pool: tuple[int, ...] = (48, 52, 55, 60, 64, 67, 72),
    min_dur: int = 120,
    max_dur: int = 600,
    max_gap: int = 300,
) -> Excerpt:
    """An excerpt with no same-pitch overlaps, built pitch by pitch.

    Notes on the same pitch are chained with nonnegative gaps, so the
    result is valid input for every degradation.
    """
    cursors = {p: 0 for p in pitch_pool}
    notes = []
    for _ in range(n_notes):
        pitch = int(gen.choice(pitch_pool))
        gap = int(gen.integers(0, max_gap + 1))
        dur = int(gen.integers(min_dur, max_dur + 1))
        onset = cursors[pitch] + gap
        notes.append(Note(pitch, onset, dur, 0))
        cursors[pitch] = onset + dur
    return Excerpt(notes)


def same_pitch_overlaps(excerpt: Excerpt) -> list[tuple[Note, Note]]:
    """Exhaustive pairwise overlap check (the oracle for overlap safety)."""
    bad = []
    notes = excerpt.notes
    for i in range(len(notes)):
        for j in range(i + 1, len(notes)):
            a, b = notes[i], notes[j]
            if a.pitch == b.pitch and a.onset < b.offset and b.onset < a.offset:
                bad.append((a, b))
    return bad


# ---------------------------------------------------------------------------
# Raw Standard MIDI File construction (tests build files byte by byte).


def vlq(value: int) -> bytes:
    """Variable-length quantity encoding."""
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def midi_track(events: list[tuple[int, bytes]]) -> bytes:
    """An MTrk chunk from (delta_ticks, event_bytes) pairs.

    An end-of-track meta event is appended automatically.
    """
    body = b"".join(vlq(delta) + payload for delta, payload in events)
    body += vlq(0) + bytes([0xFF, 0x2F, 0x00])
    return b"MTrk" + len(body).to_bytes(4, "big") + body


def midi_file(
    tracks: list[list[tuple[int, bytes]]], tpq: int = 480, fmt: int = 1
) -> bytes:
    header = b"MThd" + (6).to_bytes(4, "big")
    header += fmt.to_bytes(2, "big") + len(tracks).to_bytes(2, "big") + tpq.to_bytes(2, "big")
    return header + b"".join(midi_track(t) for t in tracks)


def note_on(pitch: int, velocity: int = 64, channel: int = 0) -> bytes:
    return bytes([0x90 | channel, pitch, velocity])


def note_off(pitch: int, velocity: int = 0, channel: int = 0) -> bytes:
    return bytes([0x80 | channel, pitch, velocity])


def tempo_event(us_per_quarter: int) -> bytes:
    return bytes([0xFF, 0x51, 0x03]) + us_per_quarter.to_bytes(3, "big")


@pytest.fixture
def gen() -> np.random.Generator:
    return np.random.default_rng(987654321)
