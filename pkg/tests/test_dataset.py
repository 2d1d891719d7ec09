import filecmp
import json

import numpy as np
import pytest

from mdtk.core import CorpusItem, Excerpt, Note
from mdtk.dataset import (
    SPLIT_NAMES,
    DatasetConfig,
    build_dataset,
    extract_excerpt,
    largest_remainder_sizes,
    load_dataset,
)
from mdtk.degradations import DEGRADATION_IDS, NO_DEGRADATION
from mdtk.rng import RandomSource

from conftest import random_excerpt, same_pitch_overlaps


def make_piece(gen, n_notes=40) -> Excerpt:
    return random_excerpt(
        gen,
        n_notes=n_notes,
        pitch_pool=(48, 52, 55, 57, 60, 62, 64, 67, 72),
        min_dur=150,
        max_dur=500,
        max_gap=120,
    )


def make_corpus(gen, n_pieces=90):
    return [
        CorpusItem(source_id=f"piece_{i:03d}", excerpt=make_piece(gen))
        for i in range(n_pieces)
    ]


class TestExtractExcerpt:
    def test_too_few_notes_returns_none(self, gen):
        piece = random_excerpt(gen, n_notes=9)
        config = DatasetConfig()
        assert extract_excerpt(piece, config, RandomSource(0)) is None

    def test_ten_simultaneous_notes(self):
        piece = Excerpt([Note(50 + i, 0, 400) for i in range(10)])
        out = extract_excerpt(piece, DatasetConfig(), RandomSource(0))
        assert out is not None and len(out) == 10
        assert out.notes[0].onset == 0

    def test_rebased_onsets_inside_window(self, gen):
        for seed in range(30):
            piece = make_piece(gen, n_notes=60)
            out = extract_excerpt(piece, DatasetConfig(), RandomSource(seed))
            if out is None:
                continue
            assert min(n.onset for n in out) == 0
            assert all(n.onset < 5000 for n in out)
            assert len(out) >= 10

    def test_empty_piece(self):
        assert extract_excerpt(Excerpt(), DatasetConfig(), RandomSource(0)) is None


class TestLargestRemainder:
    def test_exact_split_of_90(self):
        assert largest_remainder_sizes(90, (0.8, 0.1, 0.1)) == [72, 9, 9]

    def test_sizes_sum_and_stay_close(self):
        for n in (1, 7, 10, 89, 91, 1000):
            sizes = largest_remainder_sizes(n, (0.8, 0.1, 0.1))
            assert sum(sizes) == n
            for size, frac in zip(sizes, (0.8, 0.1, 0.1)):
                assert abs(size - frac * n) < 1.0


class TestBuildDataset:
    def test_default_build_90_pieces(self, gen, tmp_path):
        corpus = make_corpus(gen, 90)
        config = DatasetConfig(seed=11)
        items = build_dataset(corpus, config, out_dir=tmp_path)
        assert len(items) == 90
        by_split = {s: [i for i in items if i.split == s] for s in SPLIT_NAMES}
        assert [len(by_split[s]) for s in SPLIT_NAMES] == [72, 9, 9]
        labels = {i.label for i in items}
        assert NO_DEGRADATION in labels
        assert len(labels & set(DEGRADATION_IDS)) >= 6

        # Tree layout.
        for item in items:
            item_dir = tmp_path / item.split / item.item_id
            assert (item_dir / "clean.csv").exists()
            assert (item_dir / "degraded.csv").exists()
        metadata = (tmp_path / "metadata.csv").read_text().splitlines()
        assert metadata[0] == "item_id,split,label,frame_labels"
        assert len(metadata) == 91
        config_echo = json.loads((tmp_path / "config.json").read_text())
        assert config_echo["seed"] == 11
        assert config_echo["splits"] == [0.8, 0.1, 0.1]

    def test_each_pair_differs_by_one_change_set(self, gen):
        corpus = make_corpus(gen, 30)
        items = build_dataset(corpus, DatasetConfig(seed=3))
        for item in items:
            clean_notes = list(item.clean.notes)
            degraded_notes = list(item.degraded.notes)
            removed = [n for n in clean_notes if n not in degraded_notes]
            added = [n for n in degraded_notes if n not in clean_notes]
            label = item.label
            if label == NO_DEGRADATION:
                assert removed == [] and added == []
            elif label == "add_note":
                assert len(removed) == 0 and len(added) == 1
            elif label == "remove_note":
                assert len(removed) == 1 and len(added) == 0
            elif label in ("pitch_shift", "onset_shift", "offset_shift", "time_shift"):
                assert len(removed) == 1 and len(added) == 1
            elif label == "split_note":
                assert len(removed) == 1 and len(added) >= 2
                assert sum(n.dur for n in added) == removed[0].dur
            elif label == "join_notes":
                assert len(removed) >= 2 and len(added) == 1

    def test_frame_labels_zero_iff_clean(self, gen):
        corpus = make_corpus(gen, 40)
        items = build_dataset(corpus, DatasetConfig(seed=5))
        for item in items:
            if item.label == NO_DEGRADATION:
                assert item.frame_labels.sum() == 0
                assert item.clean == item.degraded
            else:
                assert item.frame_labels.sum() > 0
                assert item.clean != item.degraded

    def test_clean_proportion_one(self, gen):
        corpus = make_corpus(gen, 12)
        items = build_dataset(corpus, DatasetConfig(clean_proportion=1.0, seed=2))
        assert all(item.label == NO_DEGRADATION for item in items)
        assert all(item.frame_labels.sum() == 0 for item in items)

    def test_deterministic_tree(self, gen, tmp_path):
        corpus = make_corpus(gen, 20)
        config = DatasetConfig(seed=7)
        build_dataset(corpus, config, out_dir=tmp_path / "a")
        build_dataset(corpus, config, out_dir=tmp_path / "b")
        comparison = filecmp.dircmp(tmp_path / "a", tmp_path / "b")

        def assert_same(cmp):
            assert cmp.left_only == [] and cmp.right_only == []
            assert cmp.diff_files == []
            for sub in cmp.subdirs.values():
                assert_same(sub)

        assert_same(comparison)
        # Byte-level check on the top-level files.
        assert (tmp_path / "a/metadata.csv").read_bytes() == (
            tmp_path / "b/metadata.csv"
        ).read_bytes()

    def test_different_seed_permutes_membership_not_sizes(self, gen):
        corpus = make_corpus(gen, 30)
        items_a = build_dataset(corpus, DatasetConfig(seed=1))
        items_b = build_dataset(corpus, DatasetConfig(seed=2))
        sizes_a = [sum(1 for i in items_a if i.split == s) for s in SPLIT_NAMES]
        sizes_b = [sum(1 for i in items_b if i.split == s) for s in SPLIT_NAMES]
        assert sizes_a == sizes_b
        assert {(i.item_id, i.split) for i in items_a} != {
            (i.item_id, i.split) for i in items_b
        }

    def test_degraded_output_is_valid(self, gen):
        corpus = make_corpus(gen, 25)
        items = build_dataset(corpus, DatasetConfig(seed=9))
        for item in items:
            assert same_pitch_overlaps(item.degraded) == []
            assert all(n.onset < 5000 for n in item.clean)
            assert all(n.dur >= 1 for n in item.degraded)

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            build_dataset([], DatasetConfig())

    def test_duplicate_ids_rejected(self, gen):
        piece = make_piece(gen)
        with pytest.raises(ValueError):
            build_dataset(
                [CorpusItem("x", piece), CorpusItem("x", piece)], DatasetConfig()
            )

    def test_pieces_without_excerpts_skipped(self, gen):
        corpus = make_corpus(gen, 10)
        corpus.append(CorpusItem("tiny", random_excerpt(gen, n_notes=3)))
        items = build_dataset(corpus, DatasetConfig(seed=4))
        assert len(items) == 10
        assert all(item.item_id != "tiny" for item in items)

    def test_excerpts_per_piece(self, gen):
        corpus = make_corpus(gen, 6)
        items = build_dataset(
            corpus, DatasetConfig(seed=8, excerpts_per_piece=3)
        )
        assert len(items) == 18
        assert len({i.item_id for i in items}) == 18


class TestLoadDataset:
    def test_round_trip(self, gen, tmp_path):
        corpus = make_corpus(gen, 15)
        config = DatasetConfig(seed=13)
        written = build_dataset(corpus, config, out_dir=tmp_path)
        loaded = load_dataset(tmp_path)
        assert len(loaded) == len(written)
        by_id = {i.item_id: i for i in written}
        for item in loaded:
            original = by_id[item.item_id]
            assert item.split == original.split
            assert item.label == original.label
            assert item.clean == original.clean
            assert item.degraded == original.degraded
            assert np.array_equal(item.frame_labels, original.frame_labels)

    def test_split_filter(self, gen, tmp_path):
        corpus = make_corpus(gen, 20)
        build_dataset(corpus, DatasetConfig(seed=13), out_dir=tmp_path)
        train = load_dataset(tmp_path, split="train")
        assert len(train) == 16
        assert all(i.split == "train" for i in train)


class TestConfigValidation:
    def test_split_fractions_must_sum_to_one(self):
        with pytest.raises(ValueError):
            DatasetConfig(splits=(0.5, 0.2, 0.2))

    def test_min_notes_positive(self):
        with pytest.raises(ValueError):
            DatasetConfig(min_notes=0)
