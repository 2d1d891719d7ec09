import itertools

import numpy as np
import pytest

from mdtk.core import Excerpt, Note
from mdtk.degradations import LABELS, NO_DEGRADATION
from mdtk.evaluation import (
    TrainingStats,
    classification_report,
    frame_based_f,
    frame_f_measure,
    helpfulness,
    note_onset_f,
    reverse_f_measure,
    rule_based_predictor,
    training_statistics,
)
from mdtk.formats import from_piano_roll, quantize, to_piano_roll

from conftest import random_excerpt


class TestReverseF:
    def test_always_degraded_on_skewed_data_scores_zero(self):
        truths = [True] * 8 + [False]
        preds = [True] * 9
        assert reverse_f_measure(preds, truths) == 0.0

    def test_perfect_predictions(self):
        truths = [True, False, True, False]
        assert reverse_f_measure(truths, truths) == 1.0

    def test_complement_scores_zero(self):
        truths = [True, False, True]
        preds = [not t for t in truths]
        assert reverse_f_measure(preds, truths) == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            reverse_f_measure([], [])


class TestClassification:
    def test_always_one_class_on_uniform_set(self):
        truths = [label for label in LABELS for _ in range(10)]
        preds = [LABELS[0]] * len(truths)
        report = classification_report(preds, truths)
        assert report.accuracy == pytest.approx(1 / 9)

    def test_perfect_predictions_identity_confusion(self):
        truths = list(LABELS) * 3
        report = classification_report(truths, truths)
        assert report.accuracy == 1.0
        assert np.array_equal(report.confusion, np.eye(9, dtype=np.int64) * 3)

    def test_mixed_example(self):
        truths = ["pitch_shift", NO_DEGRADATION]
        preds = [NO_DEGRADATION, NO_DEGRADATION]
        report = classification_report(preds, truths)
        assert report.accuracy == 0.5
        off_diagonal = report.confusion.sum() - np.trace(report.confusion)
        assert off_diagonal == 1

    def test_rows_sum_to_class_counts(self):
        truths = ["pitch_shift"] * 4 + ["add_note"] * 2
        preds = ["pitch_shift", "add_note", "pitch_shift", NO_DEGRADATION,
                 "add_note", "add_note"]
        report = classification_report(preds, truths)
        index = {label: i for i, label in enumerate(report.labels)}
        assert report.confusion[index["pitch_shift"]].sum() == 4
        assert report.confusion[index["add_note"]].sum() == 2

    def test_unknown_label_rejected(self):
        with pytest.raises(ValueError):
            classification_report(["nonsense"], ["pitch_shift"])

    def test_normalized_rows(self):
        truths = ["pitch_shift"] * 4
        preds = ["pitch_shift", "add_note", "pitch_shift", "pitch_shift"]
        normed = classification_report(preds, truths).normalized()
        assert normed.max() == pytest.approx(0.75)


class TestFrameF:
    def test_perfect(self):
        assert frame_f_measure([1, 0, 1], [1, 0, 1])[2] == 1.0

    def test_all_zero_prediction(self):
        assert frame_f_measure([0, 0, 0], [1, 0, 1])[2] == 0.0

    def test_formula_arithmetic(self):
        # TP=3, FP=1, FN=2: P=0.75, R=0.6, F=2*.75*.6/1.35.
        pred = [1, 1, 1, 1, 0, 0]
        truth = [1, 1, 1, 0, 1, 1]
        p, r, f = frame_f_measure(pred, truth)
        assert p == pytest.approx(0.75)
        assert r == pytest.approx(0.6)
        assert f == pytest.approx(2 * 0.75 * 0.6 / 1.35)

    def test_both_empty_positive_case(self):
        assert frame_f_measure([0, 0], [0, 0]) == (1.0, 1.0, 1.0)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            frame_f_measure([0], [0, 1])


def oracle_onset_f(est: Excerpt, ref: Excerpt, tol=50) -> float:
    """Exhaustive maximum matching over all assignments (<= 6 per side)."""
    if len(est) == 0 and len(ref) == 0:
        return 1.0
    if len(est) == 0 or len(ref) == 0:
        return 0.0
    edges = [
        (i, j)
        for i, a in enumerate(est)
        for j, b in enumerate(ref)
        if a.pitch == b.pitch and abs(a.onset - b.onset) <= tol
    ]
    best = 0
    for r in range(min(len(est), len(ref)), 0, -1):
        found = False
        for combo in itertools.combinations(edges, r):
            if len({i for i, _ in combo}) == r and len({j for _, j in combo}) == r:
                found = True
                break
        if found:
            best = r
            break
    return 2 * best / (len(est) + len(ref))


class TestNoteOnsetF:
    def test_identical(self, gen):
        excerpt = random_excerpt(gen, n_notes=10)
        assert note_onset_f(excerpt, excerpt) == 1.0

    def test_maximum_matching_example(self):
        # ref has two notes near the single est note; max matching is 1,
        # so F = 2*1/(1+2).
        ref = Excerpt([Note(60, 0, 100), Note(60, 40, 100)])
        est = Excerpt([Note(60, 20, 100)])
        assert note_onset_f(est, ref) == pytest.approx(2 / 3)

    def test_pitch_mismatch_scores_zero(self):
        ref = Excerpt([Note(60, 0, 100)])
        est = Excerpt([Note(61, 0, 100)])
        assert note_onset_f(est, ref) == 0.0

    def test_empty_cases(self):
        assert note_onset_f(Excerpt(), Excerpt()) == 1.0
        assert note_onset_f(Excerpt(), Excerpt([Note(60, 0, 100)])) == 0.0

    def test_matches_exhaustive_oracle_small(self, gen):
        for _ in range(150):
            est = random_excerpt(
                gen, n_notes=int(gen.integers(0, 7)), pitch_pool=(60, 62), max_gap=40
            )
            ref = random_excerpt(
                gen, n_notes=int(gen.integers(0, 7)), pitch_pool=(60, 62), max_gap=40
            )
            assert note_onset_f(est, ref) == pytest.approx(oracle_onset_f(est, ref))


class TestFrameBasedF:
    def test_identical(self, gen):
        excerpt = random_excerpt(gen, n_notes=10)
        assert frame_based_f(excerpt, excerpt) == 1.0

    def test_agrees_with_frame_f_on_flattened_rolls(self, gen):
        # Computing the rolls externally and scoring them cell-wise with
        # the frame metric must give the same F.
        for _ in range(20):
            est = random_excerpt(gen, n_notes=int(gen.integers(1, 12)))
            ref = random_excerpt(gen, n_notes=int(gen.integers(1, 12)))
            n = max(quantize(est).n_frames, quantize(ref).n_frames)
            a = to_piano_roll(quantize(est), n_frames=n).presence.ravel()
            b = to_piano_roll(quantize(ref), n_frames=n).presence.ravel()
            assert frame_based_f(est, ref) == pytest.approx(
                frame_f_measure(a.tolist(), b.tolist())[2]
            )

    def test_one_empty(self, gen):
        excerpt = random_excerpt(gen, n_notes=5)
        assert frame_based_f(Excerpt(), excerpt) == 0.0

    def test_halved_duration_cell_counts(self):
        # ref note covers frames [0, 10); est covers [0, 5):
        # TP=5, FP=0, FN=5 -> P=1, R=0.5, F=2/3.
        ref = Excerpt([Note(60, 0, 400)])
        est = Excerpt([Note(60, 0, 200)])
        assert frame_based_f(est, ref) == pytest.approx(2 / 3)


class TestHelpfulness:
    def original(self):
        return Excerpt([Note(60, 0, 400), Note(64, 400, 400), Note(67, 800, 400)])

    def test_worked_values_exact(self):
        # Direct checks of the H formula at the stated points.
        def h_from(f_c, f_g):
            if f_g == 1.0:
                return f_c
            if f_c >= f_g:
                return 1.0 - 0.5 * (1.0 - f_c) / (1.0 - f_g)
            return 0.5 * f_c / f_g

        assert abs(h_from(0.9, 0.8) - 0.75) < 1e-12
        assert abs(h_from(0.8, 0.8) - 0.5) < 1e-12
        assert abs(h_from(0.4, 0.8) - 0.25) < 1e-12
        assert abs(h_from(0.3, 1.0) - 0.3) < 1e-12

    def test_perfect_correction_scores_one(self):
        original = self.original()
        degraded = Excerpt([Note(60, 0, 400), Note(64, 400, 400)])
        h, f_c, f_g = helpfulness(original, degraded, original)
        assert h == 1.0 and f_c == 1.0 and f_g < 1.0

    def test_echoing_the_input_scores_half(self):
        original = self.original()
        degraded = Excerpt([Note(62, 0, 400), Note(64, 400, 400), Note(67, 800, 400)])
        h, f_c, f_g = helpfulness(degraded, degraded, original)
        assert f_c == f_g < 1.0
        assert h == pytest.approx(0.5)

    def test_clean_input_uses_f_c_directly(self):
        original = self.original()
        corrected = Excerpt([Note(62, 0, 400)])
        h, f_c, f_g = helpfulness(corrected, original, original)
        assert f_g == 1.0
        assert h == f_c < 1.0

    def test_continuity_and_monotonicity(self):
        def h_from(f_c, f_g):
            if f_g == 1.0:
                return f_c
            if f_c >= f_g:
                return 1.0 - 0.5 * (1.0 - f_c) / (1.0 - f_g)
            return 0.5 * f_c / f_g

        for f_g in (0.1, 0.5, 0.9):
            below = h_from(f_g - 1e-12, f_g)
            at = h_from(f_g, f_g)
            assert abs(below - 0.5) < 1e-9 and at == 0.5
            values = [h_from(f_c, f_g) for f_c in np.linspace(0, 1, 101)]
            assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
            assert all(0.0 <= v <= 1.0 for v in values)


class TestRuleBasedPredictors:
    def stats(self, **overrides):
        defaults = dict(
            degraded_rate=8 / 9,
            frame_rate=0.06,
            p_one_given_zero=0.01,
            p_one_given_one=0.96,
        )
        defaults.update(overrides)
        return TrainingStats(**defaults)

    def test_task1_always_degraded_reverse_f_zero(self):
        predictor = rule_based_predictor(1, self.stats())
        truths = [True] * 80 + [False] * 10
        preds = [predictor(None) for _ in truths]
        assert reverse_f_measure(preds, truths) == 0.0

    def test_task2_uniform_guess_accuracy_one_ninth(self):
        predictor = rule_based_predictor(2, self.stats())
        truths = [label for label in LABELS for _ in range(100)]
        preds = [predictor(None) for _ in truths]
        assert classification_report(preds, truths).accuracy == pytest.approx(1 / 9)

    def test_task3_low_rate_predicts_all_zero(self):
        predictor = rule_based_predictor(3, self.stats())
        pred = predictor(50)
        assert pred.sum() == 0
        assert frame_f_measure(pred, [1] * 25 + [0] * 25)[2] == 0.0

    def test_task4_reproduces_input_roll(self, gen):
        predictor = rule_based_predictor(4, self.stats())
        roll = to_piano_roll(quantize(random_excerpt(gen, n_notes=10)))
        out = predictor(roll)
        assert np.array_equal(out.presence, roll.presence)
        assert np.array_equal(out.onsets, roll.onsets)

    def test_task4_identity_scores_half_on_degraded(self, gen):
        predictor = rule_based_predictor(4, self.stats())
        original = Excerpt([Note(60, 0, 400), Note(64, 400, 400), Note(67, 800, 400)])
        degraded = Excerpt([Note(62, 0, 400), Note(64, 400, 400), Note(67, 800, 400)])
        roll = to_piano_roll(quantize(degraded))
        from mdtk.formats import dequantize

        corrected = dequantize(from_piano_roll(predictor(roll)))
        h, f_c, f_g = helpfulness(corrected, degraded, original)
        assert h == pytest.approx(0.5)

    def test_training_statistics_basic(self):
        clean = Excerpt([Note(60, 0, 400)])
        degraded = Excerpt([Note(62, 0, 400)])
        stats = training_statistics(
            [(clean, degraded, "pitch_shift"), (clean, clean, NO_DEGRADATION)]
        )
        assert stats.degraded_rate == 0.5
        assert 0.0 < stats.frame_rate < 1.0
        assert stats.p_one_given_one == 0.5  # half the degraded cells survive
