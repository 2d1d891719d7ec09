"""Degraded-dataset construction: excerpt extraction, mixing, splits, layout.

Pieces are flattened and overlap-fixed, a short excerpt is cut from each,
most excerpts are degraded (8/9 by default, uniformly over the eight
degradations), and the labeled results are split deterministically into
train/valid/test and written as a CSV tree.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import CorpusItem, Excerpt, Note, fix_overlaps, flatten_tracks, load_csv, write_csv
from .degradations import DegradationParams
from .degrader import DegraderConfig, DEFAULT_CLEAN_PROPORTION, sample_outcome
from .formats import DEFAULT_FRAME_MS, frame_labels
from .rng import RandomSource

__all__ = [
    "SPLIT_NAMES",
    "DatasetConfig",
    "LabeledExcerpt",
    "extract_excerpt",
    "largest_remainder_sizes",
    "build_dataset",
    "load_dataset",
]

logger = logging.getLogger(__name__)

SPLIT_NAMES = ("train", "valid", "test")

METADATA_HEADER = "item_id,split,label,frame_labels"


@dataclass(frozen=True)
class DatasetConfig:
    """Everything that determines a dataset build, including the seed."""

    excerpt_length_ms: int = 5000
    min_notes: int = 10
    clean_proportion: float = DEFAULT_CLEAN_PROPORTION
    weights: dict[str, float] | None = None
    params: dict[str, DegradationParams] = field(default_factory=dict)
    splits: tuple[float, float, float] = (0.8, 0.1, 0.1)
    seed: int = 0
    frame_ms: int = DEFAULT_FRAME_MS
    excerpts_per_piece: int = 1

    def __post_init__(self):
        if self.excerpt_length_ms < 1:
            raise ValueError("excerpt_length_ms must be >= 1")
        if self.min_notes < 1:
            raise ValueError("min_notes must be >= 1")
        if self.excerpts_per_piece < 1:
            raise ValueError("excerpts_per_piece must be >= 1")
        if len(self.splits) != len(SPLIT_NAMES):
            raise ValueError(f"need {len(SPLIT_NAMES)} split fractions")
        if any(f < 0 for f in self.splits):
            raise ValueError("split fractions must be nonnegative")
        if abs(sum(self.splits) - 1.0) > 1e-9:
            raise ValueError(f"split fractions must sum to 1, got {sum(self.splits)}")

    def degrader_config(self) -> DegraderConfig:
        return DegraderConfig(
            clean_proportion=self.clean_proportion,
            weights=self.weights,
            params=self.params,
            seed=self.seed,
        )

    def to_dict(self) -> dict:
        params = {
            name: {
                "min_pitch": p.min_pitch,
                "max_pitch": p.max_pitch,
                "interval_weights": (
                    None
                    if p.interval_weights is None
                    else {str(k): v for k, v in p.interval_weights.items()}
                ),
                "align_pitch": p.align_pitch,
                "align_onset": p.align_onset,
                "align_dur": p.align_dur,
                "min_shift_ms": p.min_shift_ms,
                "max_shift_ms": p.max_shift_ms,
                "min_dur_ms": p.min_dur_ms,
                "max_dur_ms": p.max_dur_ms,
                "num_splits": p.num_splits,
                "max_gap_ms": p.max_gap_ms,
            }
            for name, p in sorted(self.params.items())
        }
        return {
            "excerpt_length_ms": self.excerpt_length_ms,
            "min_notes": self.min_notes,
            "clean_proportion": self.clean_proportion,
            "weights": self.weights,
            "params": params,
            "splits": list(self.splits),
            "seed": self.seed,
            "frame_ms": self.frame_ms,
            "excerpts_per_piece": self.excerpts_per_piece,
        }


@dataclass
class LabeledExcerpt:
    """One dataset item: the clean/degraded pair plus its labels."""

    item_id: str
    split: str
    clean: Excerpt
    degraded: Excerpt
    label: str
    frame_labels: np.ndarray

    def frame_labels_string(self) -> str:
        return "".join("1" if b else "0" for b in self.frame_labels)


def extract_excerpt(
    piece: Excerpt, config: DatasetConfig, rng: RandomSource
) -> Excerpt | None:
    """Cut a short excerpt anchored on a random note.

    The excerpt holds every note whose onset falls within
    [anchor, anchor + excerpt_length_ms), re-based so the anchor starts
    at 0; it ends when its last held note is released.  Anchors are tried
    in random order until one yields at least `min_notes` notes; if none
    does, the piece is skipped (None is returned).
    """
    if len(piece) == 0:
        logger.warning("cannot extract an excerpt from an empty piece")
        return None
    for anchor_index in rng.permutation(len(piece)):
        start = piece[int(anchor_index)].onset
        end = start + config.excerpt_length_ms
        selected = [n for n in piece if start <= n.onset < end]
        if len(selected) >= config.min_notes:
            return Excerpt(
                Note(n.pitch, n.onset - start, n.dur, n.track) for n in selected
            )
    logger.warning(
        "no anchor gives an excerpt with >= %d notes; skipping piece",
        config.min_notes,
    )
    return None


def largest_remainder_sizes(n: int, fractions: tuple[float, ...]) -> list[int]:
    """Integer split sizes summing to n, each within 1 of its exact quota."""
    quotas = [f * n for f in fractions]
    sizes = [int(q) for q in quotas]
    leftover = n - sum(sizes)
    order = sorted(range(len(quotas)), key=lambda i: (sizes[i] - quotas[i], i))
    for i in range(leftover):
        sizes[order[i]] += 1
    return sizes


def build_dataset(
    corpus: list[CorpusItem],
    config: DatasetConfig,
    out_dir: str | Path | None = None,
) -> list[LabeledExcerpt]:
    """Build the labeled dataset and optionally write it to disk.

    Per item: flatten tracks, fix overlaps, extract an excerpt, apply one
    draw of the degradation mixture, and compute frame labels.  Pieces
    that yield no valid excerpt are skipped with a warning.  Items are
    then split into train/valid/test by a seeded shuffle with
    largest-remainder rounding, and written as::

        <out>/{train,valid,test}/<item_id>/{clean.csv,degraded.csv}
        <out>/metadata.csv
        <out>/config.json

    The whole build is a pure function of (corpus, config): rerunning
    with the same seed produces a byte-identical tree.
    """
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    ids = [item.source_id for item in corpus]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate source_id in corpus")

    degrader_config = config.degrader_config()
    root = RandomSource(config.seed)
    shuffle_rng = root.split(0)

    items: list[LabeledExcerpt] = []
    for piece_index, corpus_item in enumerate(sorted(corpus, key=lambda c: c.source_id)):
        piece = fix_overlaps(flatten_tracks(corpus_item.excerpt))
        for sub in range(config.excerpts_per_piece):
            item_rng = root.split(piece_index + 1).split(sub)
            excerpt = extract_excerpt(piece, config, item_rng)
            if excerpt is None:
                logger.warning("skipping %s (no valid excerpt)", corpus_item.source_id)
                continue
            outcome = sample_outcome(excerpt, degrader_config, item_rng)
            labels = frame_labels(excerpt, outcome.excerpt, config.frame_ms)
            item_id = (
                corpus_item.source_id
                if config.excerpts_per_piece == 1
                else f"{corpus_item.source_id}__{sub}"
            )
            items.append(
                LabeledExcerpt(
                    item_id=item_id,
                    split="",
                    clean=excerpt,
                    degraded=outcome.excerpt,
                    label=outcome.label,
                    frame_labels=labels,
                )
            )

    items.sort(key=lambda it: it.item_id)
    sizes = largest_remainder_sizes(len(items), config.splits)
    perm = shuffle_rng.permutation(len(items))
    bounds = np.cumsum([0] + sizes)
    for split_index, split in enumerate(SPLIT_NAMES):
        for k in perm[bounds[split_index] : bounds[split_index + 1]]:
            items[int(k)].split = split

    if out_dir is not None:
        _write_tree(items, config, Path(out_dir))
    return items


def _write_tree(items: list[LabeledExcerpt], config: DatasetConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for item in items:
        item_dir = out / item.split / item.item_id
        item_dir.mkdir(parents=True, exist_ok=True)
        write_csv(item.clean, item_dir / "clean.csv")
        write_csv(item.degraded, item_dir / "degraded.csv")
    with open(out / "metadata.csv", "w", encoding="utf-8", newline="") as handle:
        handle.write(METADATA_HEADER + "\n")
        for item in items:
            handle.write(
                f"{item.item_id},{item.split},{item.label},"
                f"{item.frame_labels_string()}\n"
            )
    with open(out / "config.json", "w", encoding="utf-8") as handle:
        json.dump(config.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_dataset(root: str | Path, split: str | None = None) -> list[LabeledExcerpt]:
    """Read a dataset tree back into labeled items (metadata row order)."""
    root = Path(root)
    if split is not None and split not in SPLIT_NAMES:
        raise ValueError(f"unknown split {split!r}; expected one of {SPLIT_NAMES}")
    items = []
    with open(root / "metadata.csv", "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if header != METADATA_HEADER:
            raise ValueError(f"bad metadata header: {header!r}")
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            item_id, item_split, label, labels_str = line.split(",")
            if split is not None and item_split != split:
                continue
            item_dir = root / item_split / item_id
            items.append(
                LabeledExcerpt(
                    item_id=item_id,
                    split=item_split,
                    clean=load_csv(item_dir / "clean.csv"),
                    degraded=load_csv(item_dir / "degraded.csv"),
                    label=label,
                    frame_labels=np.array([int(c) for c in labels_str], dtype=np.uint8),
                )
            )
    return items
