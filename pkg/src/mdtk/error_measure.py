"""Estimate which degradations would reproduce a transcription's errors.

Given (transcription, ground truth) excerpt pairs, notes are matched in a
fixed stage order — correct, join/split, offset shift, onset shift, time
shift, pitch shift — and whatever remains is counted as added or removed
notes.  The decomposition is heuristic: many degradation sets can explain
the same errors, so the output is a reasonable mix, not a unique one.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .core import Excerpt, Note
from .degradations import DEGRADATION_IDS

__all__ = [
    "ErrorProfile",
    "ProfileError",
    "measure_errors",
    "write_profile",
    "read_profile",
]

DEFAULT_THRESHOLD_MS = 50

# Join/split run search is bounded; longer runs count as multiple events.
MAX_RUN_LENGTH = 8

_COUNT_KEYS = DEGRADATION_IDS + ("clean",)


class ProfileError(ValueError):
    """A malformed error-profile file."""


@dataclass(frozen=True)
class ErrorProfile:
    """Measured fractions of each degradation type, plus the clean fraction.

    Fractions are counts divided by the total count (correct notes plus
    degradation events), so the eight proportions and `clean` sum to 1.
    """

    proportions: dict[str, float]
    clean: float
    counts: dict[str, int]
    threshold_ms: int

    @classmethod
    def from_counts(cls, counts: dict[str, int], threshold_ms: int) -> "ErrorProfile":
        counts = {key: int(counts.get(key, 0)) for key in _COUNT_KEYS}
        total = sum(counts.values())
        if total == 0:
            proportions = {name: 0.0 for name in DEGRADATION_IDS}
            clean = 1.0
        else:
            proportions = {name: counts[name] / total for name in DEGRADATION_IDS}
            clean = counts["clean"] / total
        return cls(
            proportions=proportions,
            clean=clean,
            counts=counts,
            threshold_ms=threshold_ms,
        )

    def degradation_weights(self) -> dict[str, float]:
        """The eight proportions renormalized to sum to 1 (all zero when
        no degradation was observed)."""
        mass = sum(self.proportions.values())
        if mass == 0:
            return {name: 0.0 for name in DEGRADATION_IDS}
        return {name: self.proportions[name] / mass for name in DEGRADATION_IDS}

    def to_dict(self) -> dict:
        out: dict = {name: self.proportions[name] for name in DEGRADATION_IDS}
        out["clean"] = self.clean
        out["counts"] = {key: self.counts[key] for key in _COUNT_KEYS}
        out["threshold_ms"] = self.threshold_ms
        return out


def _overlaps(a: Note, b: Note) -> bool:
    return a.onset < b.offset and b.onset < a.offset


def _measure_pair(trans: Excerpt, truth: Excerpt, thr: int) -> Counter:
    counts: Counter = Counter()
    t_notes = list(trans.notes)
    g_notes = list(truth.notes)
    t_alive = [True] * len(t_notes)
    g_alive = [True] * len(g_notes)

    def first_match(t_pred) -> int | None:
        for j, t in enumerate(t_notes):
            if t_alive[j] and t_pred(t):
                return j
        return None

    # Stage 0: correct notes (pitch equal, onset and offset within threshold).
    for i, g in enumerate(g_notes):
        j = first_match(
            lambda t, g=g: t.pitch == g.pitch
            and abs(t.onset - g.onset) <= thr
            and abs(t.offset - g.offset) <= thr
        )
        if j is not None:
            g_alive[i] = False
            t_alive[j] = False
            counts["clean"] += 1

    # Stage 1a: joins — one transcribed note covering several truth notes.
    for j, t in enumerate(t_notes):
        if not t_alive[j]:
            continue
        members = [
            i
            for i, g in enumerate(g_notes)
            if g_alive[i] and g.pitch == t.pitch and _overlaps(t, g)
        ]
        if len(members) < 2:
            continue
        t_alive[j] = False
        for i in members:
            g_alive[i] = False
        counts["join_notes"] += math.ceil(len(members) / MAX_RUN_LENGTH)
        if abs(t.onset - g_notes[members[0]].onset) > thr:
            counts["onset_shift"] += 1
        if abs(t.offset - g_notes[members[-1]].offset) > thr:
            counts["offset_shift"] += 1

    # Stage 1b: splits — several transcribed notes covering one truth note.
    for i, g in enumerate(g_notes):
        if not g_alive[i]:
            continue
        members = [
            j
            for j, t in enumerate(t_notes)
            if t_alive[j] and t.pitch == g.pitch and _overlaps(t, g)
        ]
        if len(members) < 2:
            continue
        g_alive[i] = False
        for j in members:
            t_alive[j] = False
        counts["split_note"] += math.ceil(len(members) / MAX_RUN_LENGTH)
        if abs(t_notes[members[0]].onset - g.onset) > thr:
            counts["onset_shift"] += 1
        if abs(t_notes[members[-1]].offset - g.offset) > thr:
            counts["offset_shift"] += 1

    # Stages 2-5: one-to-one shift matches, greedily in ascending onset order.
    stages = (
        ("offset_shift", lambda t, g: t.pitch == g.pitch and abs(t.onset - g.onset) <= thr),
        ("onset_shift", lambda t, g: t.pitch == g.pitch and abs(t.offset - g.offset) <= thr),
        ("time_shift", lambda t, g: t.pitch == g.pitch and _overlaps(t, g)),
        ("pitch_shift", lambda t, g: t.pitch != g.pitch and abs(t.onset - g.onset) <= thr),
    )
    for label, pred in stages:
        for i, g in enumerate(g_notes):
            if not g_alive[i]:
                continue
            j = first_match(lambda t, g=g: pred(t, g))
            if j is None:
                continue
            g_alive[i] = False
            t_alive[j] = False
            counts[label] += 1
            if label == "pitch_shift" and abs(t_notes[j].offset - g.offset) > thr:
                counts["offset_shift"] += 1

    # Stage 6: leftovers are insertions and deletions.
    counts["add_note"] += sum(t_alive)
    counts["remove_note"] += sum(g_alive)
    return counts


def measure_errors(
    pairs: Sequence[tuple[Excerpt, Excerpt]],
    threshold_ms: int = DEFAULT_THRESHOLD_MS,
) -> ErrorProfile:
    """Profile the error mix of (transcription, ground truth) pairs.

    Parameters
    ----------
    pairs : sequence of (transcription, ground_truth)
        Canonical excerpt pairs; an empty transcription against a
        non-empty truth is valid (every truth note counts as removed).
    threshold_ms : int
        Tolerance for onset/offset equality.

    Raises
    ------
    ValueError
        If `pairs` is empty.
    """
    if len(pairs) == 0:
        raise ValueError("measure_errors needs at least one excerpt pair")
    if threshold_ms < 0:
        raise ValueError(f"threshold_ms must be >= 0, got {threshold_ms}")
    totals: Counter = Counter()
    for trans, truth in pairs:
        totals.update(_measure_pair(trans, truth, threshold_ms))
    return ErrorProfile.from_counts(dict(totals), threshold_ms)


def write_profile(profile: ErrorProfile, path: str | Path) -> None:
    """Serialize a profile as JSON (schema is strict; see read_profile)."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(profile.to_dict(), handle, indent=2)
        handle.write("\n")


def read_profile(path: str | Path) -> ErrorProfile:
    """Read a profile file, validating the exact schema.

    The file must contain exactly the eight degradation fractions,
    "clean", "counts" (same keys plus "clean", integers), and
    "threshold_ms".  Missing or unknown keys raise ProfileError naming
    the key.
    """
    with open(path, "r", encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ProfileError("profile must be a JSON object")
    expected = set(_COUNT_KEYS) | {"counts", "threshold_ms"}
    missing = expected - set(raw)
    if missing:
        raise ProfileError(f"missing key: {sorted(missing)[0]}")
    unknown = set(raw) - expected
    if unknown:
        raise ProfileError(f"unknown key: {sorted(unknown)[0]}")
    proportions = {}
    for name in DEGRADATION_IDS:
        proportions[name] = _check_fraction(name, raw[name])
    clean = _check_fraction("clean", raw["clean"])
    if not isinstance(raw["counts"], dict):
        raise ProfileError("counts must be an object")
    missing = set(_COUNT_KEYS) - set(raw["counts"])
    if missing:
        raise ProfileError(f"missing key: counts.{sorted(missing)[0]}")
    unknown = set(raw["counts"]) - set(_COUNT_KEYS)
    if unknown:
        raise ProfileError(f"unknown key: counts.{sorted(unknown)[0]}")
    counts = {}
    for key in _COUNT_KEYS:
        value = raw["counts"][key]
        if not isinstance(value, int) or isinstance(value, bool) or value < 0:
            raise ProfileError(f"counts.{key} must be a nonnegative integer")
        counts[key] = value
    threshold = raw["threshold_ms"]
    if not isinstance(threshold, int) or isinstance(threshold, bool) or threshold < 0:
        raise ProfileError("threshold_ms must be a nonnegative integer")
    return ErrorProfile(
        proportions=proportions, clean=clean, counts=counts, threshold_ms=threshold
    )


def _check_fraction(name: str, value) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ProfileError(f"{name} must be a number")
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ProfileError(f"{name} must lie in [0, 1], got {value}")
    return value
