"""Standard MIDI File (format 0/1) reader producing integer-millisecond notes.

The parser walks the raw bytes directly so that errors can name the exact
byte offset, and converts tick times to milliseconds with exact integer
arithmetic over the file's tempo map (half-up rounding).
"""
from __future__ import annotations

import bisect
import logging
from pathlib import Path

from .core import Excerpt, Note

__all__ = ["MidiParseError", "load_midi"]

logger = logging.getLogger(__name__)

DEFAULT_TEMPO = 500_000  # microseconds per quarter note (120 BPM)
PERCUSSION_CHANNEL = 9  # MIDI channel 10, 0-based


class MidiParseError(ValueError):
    """An unreadable or corrupt MIDI file; `offset` is the byte position."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (byte offset {offset})")


class _Reader:
    __slots__ = ("data", "pos")

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MidiParseError(f"unexpected end of file reading {n} bytes", self.pos)
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def byte(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def varlen(self) -> int:
        value = 0
        for _ in range(4):
            b = self.byte()
            value = (value << 7) | (b & 0x7F)
            if not b & 0x80:
                return value
        raise MidiParseError("variable-length quantity longer than 4 bytes", self.pos)


class _TempoMap:
    """Tick -> millisecond conversion over a piecewise-constant tempo map.

    Cumulative time is carried as an exact integer in units of
    microseconds * ticks_per_quarter, so rounding happens once, half-up,
    at the final division to milliseconds.
    """

    def __init__(self, tempo_events: list[tuple[int, int]], ticks_per_quarter: int):
        self.tpq = ticks_per_quarter
        ticks = [0]
        tempos = [DEFAULT_TEMPO]
        cum = [0]  # microseconds * tpq at each segment start
        for tick, tempo in sorted(tempo_events):
            if tick == ticks[-1]:
                tempos[-1] = tempo  # same-tick changes: last one wins
                continue
            cum.append(cum[-1] + (tick - ticks[-1]) * tempos[-1])
            ticks.append(tick)
            tempos.append(tempo)
        self._ticks = ticks
        self._tempos = tempos
        self._cum = cum

    def to_ms(self, tick: int) -> int:
        i = bisect.bisect_right(self._ticks, tick) - 1
        num = self._cum[i] + (tick - self._ticks[i]) * self._tempos[i]
        denom = 1000 * self.tpq  # num/denom is the time in milliseconds
        return (2 * num + denom) // (2 * denom)


class _SmpteMap:
    """Tick -> millisecond conversion for SMPTE divisions (tempo-free)."""

    def __init__(self, frames_per_second: int, ticks_per_frame: int):
        self.denom = frames_per_second * ticks_per_frame

    def to_ms(self, tick: int) -> int:
        return (2000 * tick + self.denom) // (2 * self.denom)


def _parse_track(reader: _Reader, track_index: int):
    """Parse one MTrk chunk into (note_events, tempo_events, end_tick).

    note_events are (tick, channel, pitch, is_on) tuples in file order.
    """
    header_at = reader.pos
    if reader.take(4) != b"MTrk":
        raise MidiParseError(f"track {track_index}: missing MTrk header", header_at)
    length = reader.u32()
    end = reader.pos + length
    if end > len(reader.data):
        raise MidiParseError(
            f"track {track_index}: declared length {length} exceeds file size",
            header_at + 4,
        )

    notes: list[tuple[int, int, int, bool]] = []
    tempos: list[tuple[int, int]] = []
    tick = 0
    running_status: int | None = None
    while reader.pos < end:
        tick += reader.varlen()
        status_at = reader.pos
        status = reader.byte()
        if status < 0x80:
            if running_status is None:
                raise MidiParseError("data byte with no running status", status_at)
            status = running_status
            reader.pos = status_at  # re-read byte as first operand
        if status == 0xFF:
            running_status = None
            meta_type = reader.byte()
            meta_len = reader.varlen()
            meta = reader.take(meta_len)
            if meta_type == 0x51:
                if meta_len != 3:
                    raise MidiParseError("tempo event with bad length", status_at)
                tempos.append((tick, int.from_bytes(meta, "big")))
            elif meta_type == 0x2F:
                tick_end = tick
                reader.pos = end
                return notes, tempos, tick_end
        elif status in (0xF0, 0xF7):
            running_status = None
            reader.take(reader.varlen())
        elif status >= 0x80:
            running_status = status
            kind = status & 0xF0
            channel = status & 0x0F
            if kind in (0xC0, 0xD0):
                reader.byte()
            elif kind in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
                d1 = reader.byte()
                d2 = reader.byte()
                if kind == 0x90 and d2 > 0:
                    notes.append((tick, channel, d1, True))
                elif kind == 0x80 or (kind == 0x90 and d2 == 0):
                    notes.append((tick, channel, d1, False))
            else:
                raise MidiParseError(f"unknown status byte 0x{status:02x}", status_at)
    return notes, tempos, tick


def load_midi(path: str | Path, *, include_percussion: bool = True) -> Excerpt:
    """Load a format 0 or 1 Standard MIDI File as an excerpt.

    Note-on/note-off pairs become notes (velocity-0 note-ons count as
    note-offs, a note-off closes the earliest open note of that pitch and
    channel, and notes still open at end-of-track are closed there).
    Tick times are converted to integer milliseconds using the file's
    tempo map, defaulting to 120 BPM where no tempo event exists.

    Parameters
    ----------
    path : path
        File to read.
    include_percussion : bool
        When False, notes on MIDI channel 10 are dropped.

    Raises
    ------
    MidiParseError
        For an unreadable or corrupt file, naming the byte offset.
    """
    data = Path(path).read_bytes()
    reader = _Reader(data)
    if reader.take(4) != b"MThd":
        raise MidiParseError("missing MThd header", 0)
    header_len = reader.u32()
    if header_len < 6:
        raise MidiParseError(f"header length {header_len} < 6", 4)
    fmt = reader.u16()
    n_tracks = reader.u16()
    division = reader.u16()
    reader.take(header_len - 6)
    if fmt not in (0, 1):
        raise MidiParseError(f"unsupported MIDI format {fmt}", 8)

    all_notes = []
    all_tempos = []
    for track_index in range(n_tracks):
        notes, tempos, end_tick = _parse_track(reader, track_index)
        all_notes.append((notes, end_tick))
        all_tempos.extend(tempos)

    if division & 0x8000:
        fps = 256 - (division >> 8)  # negative SMPTE byte
        ticks_per_frame = division & 0xFF
        clock = _SmpteMap(fps, ticks_per_frame)
    else:
        if division == 0:
            raise MidiParseError("zero ticks-per-quarter division", 12)
        clock = _TempoMap(all_tempos, division)

    out: list[Note] = []
    for track_index, (events, end_tick) in enumerate(all_notes):
        open_notes: dict[tuple[int, int], list[int]] = {}
        for tick, channel, pitch, is_on in events:
            if not include_percussion and channel == PERCUSSION_CHANNEL:
                continue
            key = (channel, pitch)
            if is_on:
                open_notes.setdefault(key, []).append(tick)
            else:
                stack = open_notes.get(key)
                if not stack:
                    logger.warning(
                        "%s: note-off with no matching note-on "
                        "(track %d, channel %d, pitch %d, tick %d); ignored",
                        path, track_index, channel, pitch, tick,
                    )
                    continue
                on_tick = stack.pop(0)
                _emit(out, clock, on_tick, tick, pitch, track_index)
        for (channel, pitch), stack in open_notes.items():
            for on_tick in stack:
                _emit(out, clock, on_tick, end_tick, pitch, track_index)
    return Excerpt(out)


def _emit(out: list[Note], clock, on_tick: int, off_tick: int, pitch: int, track: int):
    onset = clock.to_ms(on_tick)
    dur = clock.to_ms(off_tick) - onset
    # Sub-millisecond notes round to zero length; keep them at 1 ms so the
    # note count matches the matched note-on count.
    out.append(Note(pitch=pitch, onset=onset, dur=max(dur, 1), track=track))
