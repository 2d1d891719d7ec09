"""Metrics for the four tasks, the helpfulness score, and rule-based baselines.

Task 1 (detection) uses a reverse F-measure with the minority clean class
as positive; task 2 (classification) accuracy plus a 9x9 confusion
matrix; task 3 (location) frame-level precision/recall/F; task 4
(correction) the helpfulness score H built from frame-based and
note-onset F-measures against the original excerpt.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .core import Excerpt
from .degradations import LABELS, NO_DEGRADATION
from .formats import (
    DEFAULT_FRAME_MS,
    PianoRollPair,
    frame_labels,
    quantize,
    to_piano_roll,
)

__all__ = [
    "EvalReport",
    "ClassificationReport",
    "TrainingStats",
    "reverse_f_measure",
    "classification_report",
    "frame_f_measure",
    "note_onset_f",
    "frame_based_f",
    "helpfulness",
    "training_statistics",
    "rule_based_predictor",
]

DEFAULT_ONSET_TOL_MS = 50


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision/recall/F; all three are 1 when no positives exist anywhere."""
    if tp + fp + fn == 0:
        return 1.0, 1.0, 1.0
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f


def reverse_f_measure(
    pred_degraded: Sequence[bool], true_degraded: Sequence[bool]
) -> float:
    """F-measure over excerpts with the NOT-degraded class as positive.

    A predictor that always answers "degraded" scores 0 on any set that
    contains clean excerpts.
    """
    if len(pred_degraded) != len(true_degraded):
        raise ValueError("prediction and truth lengths differ")
    if len(pred_degraded) == 0:
        raise ValueError("empty input")
    tp = fp = fn = 0
    for pred, true in zip(pred_degraded, true_degraded):
        pred_clean, true_clean = not pred, not true
        if pred_clean and true_clean:
            tp += 1
        elif pred_clean:
            fp += 1
        elif true_clean:
            fn += 1
    return _prf(tp, fp, fn)[2]


@dataclass(frozen=True)
class ClassificationReport:
    """Accuracy and a confusion matrix with rows = truth, columns = prediction."""

    accuracy: float
    confusion: np.ndarray
    labels: tuple[str, ...]

    def normalized(self) -> np.ndarray:
        """Confusion normalized by true label (rows sum to 1 where defined)."""
        totals = self.confusion.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            normed = np.where(totals > 0, self.confusion / totals, 0.0)
        return normed


def classification_report(
    predictions: Sequence[str], truths: Sequence[str]
) -> ClassificationReport:
    """Exact-match accuracy plus the 9x9 confusion matrix."""
    if len(predictions) != len(truths):
        raise ValueError("prediction and truth lengths differ")
    if len(predictions) == 0:
        raise ValueError("empty input")
    index = {label: i for i, label in enumerate(LABELS)}
    confusion = np.zeros((len(LABELS), len(LABELS)), dtype=np.int64)
    hits = 0
    for pred, true in zip(predictions, truths):
        if pred not in index:
            raise ValueError(f"unknown predicted label: {pred!r}")
        if true not in index:
            raise ValueError(f"unknown true label: {true!r}")
        confusion[index[true], index[pred]] += 1
        hits += pred == true
    return ClassificationReport(
        accuracy=hits / len(predictions), confusion=confusion, labels=LABELS
    )


def frame_f_measure(
    pred: Sequence[int], truth: Sequence[int]
) -> tuple[float, float, float]:
    """Binary precision/recall/F over frames."""
    if len(pred) != len(truth):
        raise ValueError(f"length mismatch: {len(pred)} vs {len(truth)}")
    tp = fp = fn = 0
    for p, t in zip(pred, truth):
        if p and t:
            tp += 1
        elif p:
            fp += 1
        elif t:
            fn += 1
    return _prf(tp, fp, fn)


def note_onset_f(
    est: Excerpt, ref: Excerpt, onset_tol_ms: int = DEFAULT_ONSET_TOL_MS
) -> float:
    """Note-based onset-only F-measure.

    Uses the maximum one-to-one matching between estimated and reference
    notes with equal pitch and onsets within the tolerance (an augmenting-
    path matching, not a greedy one).
    """
    if len(est) == 0 and len(ref) == 0:
        return 1.0
    if len(est) == 0 or len(ref) == 0:
        return 0.0
    ep, eo, _, _ = est.arrays()
    rp, ro, _, _ = ref.arrays()
    matches = _kernels.onset_match_count(ep, eo, rp, ro, onset_tol_ms)
    return 2 * matches / (len(est) + len(ref))


def frame_based_f(
    est: Excerpt, ref: Excerpt, frame_ms: int = DEFAULT_FRAME_MS
) -> float:
    """Frame-based F-measure over active presence cells."""
    q_est = quantize(est, frame_ms)
    q_ref = quantize(ref, frame_ms)
    n = max(q_est.n_frames, q_ref.n_frames)
    a = to_piano_roll(q_est, n_frames=n).presence.astype(bool)
    b = to_piano_roll(q_ref, n_frames=n).presence.astype(bool)
    tp = int((a & b).sum())
    fp = int((a & ~b).sum())
    fn = int((~a & b).sum())
    return _prf(tp, fp, fn)[2]


def helpfulness(
    corrected: Excerpt,
    given: Excerpt,
    original: Excerpt,
    frame_ms: int = DEFAULT_FRAME_MS,
    onset_tol_ms: int = DEFAULT_ONSET_TOL_MS,
) -> tuple[float, float, float]:
    """Score a correction against the degraded input it was given.

    Accuracy of each excerpt versus the original is the mean of the
    frame-based and note-onset F-measures (F_c for the correction, F_g
    for the given excerpt).  H is 0.5 when the correction is exactly as
    accurate as its input, scaling linearly to 1 (errors fully removed)
    and down to 0; when the input was already perfect, H is simply F_c.

    Returns
    -------
    (h, f_c, f_g)
    """

    def accuracy(excerpt: Excerpt) -> float:
        return 0.5 * (
            frame_based_f(excerpt, original, frame_ms)
            + note_onset_f(excerpt, original, onset_tol_ms)
        )

    f_g = accuracy(given)
    f_c = accuracy(corrected)
    if f_g == 1.0:
        h = f_c
    elif f_c >= f_g:
        h = 1.0 - 0.5 * (1.0 - f_c) / (1.0 - f_g)
    else:
        h = 0.5 * f_c / f_g
    return h, f_c, f_g


# ---------------------------------------------------------------------------
# Rule-based reference predictors


@dataclass(frozen=True)
class TrainingStats:
    """Statistics a rule-based predictor reads off the training split."""

    degraded_rate: float
    frame_rate: float
    p_one_given_zero: float
    p_one_given_one: float


def training_statistics(
    items: Sequence[tuple[Excerpt, Excerpt, str]],
    frame_ms: int = DEFAULT_FRAME_MS,
) -> TrainingStats:
    """Compute predictor statistics from (clean, degraded, label) triples."""
    if len(items) == 0:
        raise ValueError("empty training set")
    degraded = sum(1 for _, _, label in items if label != NO_DEGRADATION)
    frames_total = 0
    frames_hit = 0
    ones = zeros = ones_to_one = zeros_to_one = 0
    for clean, degraded_ex, _ in items:
        labels = frame_labels(clean, degraded_ex, frame_ms)
        frames_total += len(labels)
        frames_hit += int(labels.sum())
        n = max(quantize(clean, frame_ms).n_frames, quantize(degraded_ex, frame_ms).n_frames)
        clean_roll = to_piano_roll(quantize(clean, frame_ms), n_frames=n).concatenated()
        deg_roll = to_piano_roll(quantize(degraded_ex, frame_ms), n_frames=n).concatenated()
        one_mask = deg_roll == 1
        ones += int(one_mask.sum())
        zeros += int((~one_mask).sum())
        ones_to_one += int((clean_roll[one_mask] == 1).sum())
        zeros_to_one += int((clean_roll[~one_mask] == 1).sum())
    return TrainingStats(
        degraded_rate=degraded / len(items),
        frame_rate=frames_hit / frames_total if frames_total else 0.0,
        p_one_given_zero=zeros_to_one / zeros if zeros else 0.0,
        p_one_given_one=ones_to_one / ones if ones else 0.0,
    )


def rule_based_predictor(task: int, stats: TrainingStats) -> Callable:
    """The constant/statistical reference predictor for a task.

    All four output probabilities thresholded at 0.5 into hard decisions:
    task 1 always answers with the majority class, task 2 with the first
    label of a uniform guess, task 3 with the constant frame decision,
    and task 4 keeps or drops roll cells by the training cell statistics
    (with the usual statistics this reproduces its input).
    """
    if task == 1:
        decision = stats.degraded_rate >= 0.5
        return lambda excerpt: decision
    if task == 2:
        return lambda excerpt: LABELS[0]
    if task == 3:
        decision = 1 if stats.frame_rate >= 0.5 else 0
        return lambda n_frames: np.full(n_frames, decision, dtype=np.uint8)
    if task == 4:
        keep_ones = stats.p_one_given_one >= 0.5
        fill_zeros = stats.p_one_given_zero >= 0.5
        return lambda pair: PianoRollPair(
            presence=_cell_rule(pair.presence, keep_ones, fill_zeros),
            onsets=_cell_rule(pair.onsets, keep_ones, fill_zeros),
        )
    raise ValueError(f"unknown task {task}; expected 1-4")


def _cell_rule(roll: np.ndarray, keep_ones: bool, fill_zeros: bool) -> np.ndarray:
    out = np.zeros_like(roll)
    if keep_ones:
        out[roll == 1] = 1
    if fill_zeros:
        out[roll == 0] = 1
    return out


# ---------------------------------------------------------------------------
# Reports


@dataclass
class EvalReport:
    """Aggregate results for one task, with optional per-item scores."""

    task: int
    summary: dict[str, float]
    per_item: dict[str, float] | None = None
    confusion: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    def to_dict(self) -> dict:
        out: dict = {"task": self.task}
        out.update(self.summary)
        if self.per_item is not None:
            out["per_item"] = self.per_item
        return out

    def write_json(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)
            handle.write("\n")

    def write_confusion_csv(self, path: str | Path) -> None:
        if self.confusion is None or self.labels is None:
            raise ValueError("report has no confusion matrix")
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(("true\\pred",) + tuple(self.labels))
            for i, label in enumerate(self.labels):
                writer.writerow((label,) + tuple(int(x) for x in self.confusion[i]))
