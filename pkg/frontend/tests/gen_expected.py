#!/usr/bin/env python3
"""Generate binding-equivalence fixtures straight from the Python library.

Writes, under the directory given as argv[1]:
  inputs/e<k>.csv       50 excerpt files
  corpus/p<k>.csv       12 larger pieces for the dataset test
  expected.json         library-computed outputs for 1000 degrade calls,
                        500 command encodings, and 500 roll encodings

The binding's job is to reproduce these exactly through the CLI.
"""
import json
import sys
from pathlib import Path

import numpy as np

from mdtk.core import Excerpt, Note, write_csv
from mdtk.degrader import DegraderConfig, sample_outcome
from mdtk.formats import frame_labels, quantize, to_commands, to_piano_roll
from mdtk.rng import RandomSource


def random_excerpt(gen, n_notes, min_dur=120, max_dur=600, max_gap=300):
    pitch_pool = (48, 52, 55, 60, 64, 67, 72)
    cursors = {p: 0 for p in pitch_pool}
    notes = []
    for _ in range(n_notes):
        pitch = int(gen.choice(pitch_pool))
        onset = cursors[pitch] + int(gen.integers(0, max_gap + 1))
        dur = int(gen.integers(min_dur, max_dur + 1))
        notes.append(Note(pitch, onset, dur, 0))
        cursors[pitch] = onset + dur
    return Excerpt(notes)


def rows(excerpt):
    return [[n.onset, n.track, n.pitch, n.dur] for n in excerpt]


def main(out_dir: Path) -> None:
    gen = np.random.default_rng(13579)
    inputs_dir = out_dir / "inputs"
    inputs_dir.mkdir(parents=True, exist_ok=True)
    excerpts = []
    for k in range(50):
        excerpt = random_excerpt(gen, n_notes=int(gen.integers(6, 20)))
        write_csv(excerpt, inputs_dir / f"e{k:02d}.csv")
        excerpts.append(excerpt)

    corpus_dir = out_dir / "corpus"
    corpus_dir.mkdir(exist_ok=True)
    for k in range(12):
        write_csv(
            random_excerpt(gen, n_notes=40, min_dur=150, max_dur=500, max_gap=120),
            corpus_dir / f"p{k:02d}.csv",
        )

    config = DegraderConfig()  # CLI defaults: clean 1/9, uniform weights
    degrade_expected = []
    for call in range(1000):
        k = call % len(excerpts)
        seed = 100_000 + call
        outcome = sample_outcome(excerpts[k], config, RandomSource(seed))
        labels = frame_labels(excerpts[k], outcome.excerpt, 40)
        degrade_expected.append(
            {
                "input": f"inputs/e{k:02d}.csv",
                "seed": seed,
                "label": outcome.label,
                "notes": rows(outcome.excerpt),
                "frame_labels": "".join(str(int(b)) for b in labels),
            }
        )

    commands_expected = []
    rolls_expected = []
    for call in range(500):
        k = call % len(excerpts)
        q = quantize(excerpts[k], 40)
        commands_expected.append(
            {"input": f"inputs/e{k:02d}.csv", "tokens": to_commands(q)}
        )
        pair = to_piano_roll(q)
        rolls_expected.append(
            {
                "input": f"inputs/e{k:02d}.csv",
                "frames": pair.n_frames,
                "presence": np.argwhere(pair.presence == 1).tolist(),
                "onsets": np.argwhere(pair.onsets == 1).tolist(),
            }
        )

    with open(out_dir / "expected.json", "w", encoding="utf-8") as handle:
        json.dump(
            {
                "degrade": degrade_expected,
                "commands": commands_expected,
                "rolls": rolls_expected,
            },
            handle,
        )


if __name__ == "__main__":
    main(Path(sys.argv[1]))
