"""Command-line surface: make-dataset, measure-errors, degrade, encode, evaluate.

All subcommands are deterministic given their flags and seed; the seed
comes from --seed, then the MDTK_SEED environment variable, then a fixed
constant (never the clock).  Logs go to standard error; machine-readable
output goes only to files or standard out.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .core import CorpusItem, CsvParseError, Excerpt, load_csv, write_csv
from .dataset import (
    SPLIT_NAMES,
    DatasetConfig,
    LabeledExcerpt,
    build_dataset,
    load_dataset,
)
from .degradations import (
    _ACCEPTED_PARAMS,
    DEGRADATION_IDS,
    DEGRADATIONS,
    LABELS,
    NO_DEGRADATION,
    DegradationParams,
)
from .degrader import DegraderConfig, mixture_from_profile, sample_outcome
from .error_measure import ProfileError, measure_errors, read_profile, write_profile
from .evaluation import (
    EvalReport,
    classification_report,
    helpfulness,
    reverse_f_measure,
    rule_based_predictor,
    training_statistics,
)
from .formats import (
    dequantize,
    frame_labels,
    from_piano_roll,
    quantize,
    to_commands,
    to_piano_roll,
    write_commands_csv,
    write_roll,
)
from .midi import MidiParseError, load_midi
from .rng import RandomSource

logger = logging.getLogger("mdtk")

# Fixed fallback seed so unseeded runs are still reproducible.
DEFAULT_SEED = 12345

MIDI_SUFFIXES = {".mid", ".midi"}

TASK_NAMES = {"detect": 1, "classify": 2, "locate": 3, "correct": 4}


class CliError(Exception):
    """A user-facing configuration or input error (exit code 1)."""


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("MDTK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"MDTK_SEED must be an integer, got {env!r}")
    return DEFAULT_SEED


def _load_notes(path: Path, *, include_percussion: bool = True) -> Excerpt:
    if path.suffix.lower() in MIDI_SUFFIXES:
        return load_midi(path, include_percussion=include_percussion)
    if path.suffix.lower() == ".csv":
        return load_csv(path)
    raise CliError(f"unsupported input type {path.suffix!r} for {path}")


def _collect_files(inputs: list[str]) -> list[Path]:
    files: list[Path] = []
    for raw in inputs:
        path = Path(raw)
        if path.is_dir():
            found = [
                p
                for p in sorted(path.rglob("*"))
                if p.suffix.lower() in MIDI_SUFFIXES | {".csv"}
            ]
            files.extend(found)
        elif path.exists():
            files.append(path)
        else:
            raise CliError(f"input not found: {path}")
    if not files:
        raise CliError("no input files found")
    return files


def _parse_interval_weights(text: str) -> dict[int, float]:
    weights = {}
    for part in text.split(","):
        if not part.strip():
            continue
        try:
            interval, weight = part.split(":")
            weights[int(interval)] = float(weight)
        except ValueError:
            raise CliError(
                f"bad interval weight {part!r}; expected e.g. '12:1,-12:0.5'"
            )
    if not weights:
        raise CliError("empty interval weight list")
    return weights


def _add_degradation_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group(
        "degradation parameters", "per-degradation overrides, e.g. --pitch-shift-min-pitch"
    )
    for name in DEGRADATION_IDS:
        for param in sorted(_ACCEPTED_PARAMS[name]):
            flag = f"--{name}-{param}".replace("_", "-")
            dest = f"{name}__{param}"
            if param.startswith("align_"):
                group.add_argument(flag, dest=dest, action="store_true", default=None,
                                   help=argparse.SUPPRESS)
            elif param == "interval_weights":
                group.add_argument(flag, dest=dest, type=str, default=None,
                                   help=argparse.SUPPRESS)
            else:
                group.add_argument(flag, dest=dest, type=int, default=None,
                                   help=argparse.SUPPRESS)


def _params_from_args(args: argparse.Namespace) -> dict[str, DegradationParams]:
    params: dict[str, DegradationParams] = {}
    for name in DEGRADATION_IDS:
        overrides = {}
        for param in _ACCEPTED_PARAMS[name]:
            value = getattr(args, f"{name}__{param}", None)
            if value is None:
                continue
            if param == "interval_weights":
                value = _parse_interval_weights(value)
            overrides[param] = value
        if overrides:
            try:
                params[name] = DegradationParams(**overrides)
            except ValueError as exc:
                raise CliError(f"bad parameters for {name}: {exc}")
    return params


def _mixture_config(args: argparse.Namespace, seed: int) -> DegraderConfig:
    clean = args.clean_proportion
    weights = None
    if getattr(args, "profile", None):
        try:
            profile = read_profile(args.profile)
            profile_clean, weights = mixture_from_profile(profile)
        except (OSError, ProfileError, ValueError) as exc:
            raise CliError(f"cannot use profile {args.profile}: {exc}")
        if clean is None:
            clean = profile_clean
    if clean is None:
        clean = 1.0 / 9.0
    try:
        return DegraderConfig(
            clean_proportion=clean,
            weights=weights,
            params=_params_from_args(args),
            seed=seed,
        )
    except ValueError as exc:
        raise CliError(str(exc))


# ---------------------------------------------------------------------------
# make-dataset


def cmd_make_dataset(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    files = _collect_files(args.input)
    corpus: list[CorpusItem] = []
    used_ids: set[str] = set()
    for path in files:
        try:
            excerpt = _load_notes(path, include_percussion=not args.exclude_percussion)
        except (MidiParseError, CsvParseError, CliError) as exc:
            logger.warning("skipping %s: %s", path, exc)
            continue
        source_id = path.stem
        k = 1
        while source_id in used_ids:
            source_id = f"{path.stem}_{k}"
            k += 1
        used_ids.add(source_id)
        corpus.append(CorpusItem(source_id=source_id, excerpt=excerpt))
    if not corpus:
        raise CliError("no readable input files")

    mixture = _mixture_config(args, seed)
    try:
        splits = tuple(float(f) for f in args.splits.split(","))
        config = DatasetConfig(
            excerpt_length_ms=args.excerpt_ms,
            min_notes=args.min_notes,
            clean_proportion=mixture.clean_proportion,
            weights=mixture.weights,
            params=mixture.params,
            splits=splits,
            seed=seed,
            frame_ms=args.frame_ms,
            excerpts_per_piece=args.excerpts_per_piece,
        )
    except ValueError as exc:
        raise CliError(str(exc))
    items = build_dataset(corpus, config, out_dir=args.out)
    logger.info("wrote %d items to %s", len(items), args.out)
    return 0


# ---------------------------------------------------------------------------
# measure-errors


def cmd_measure_errors(args: argparse.Namespace) -> int:
    trans_dir = Path(args.trans)
    gt_dir = Path(args.gt)
    if not trans_dir.is_dir() or not gt_dir.is_dir():
        raise CliError("--trans and --gt must be directories")

    def index_dir(root: Path) -> dict[str, Path]:
        out = {}
        for p in sorted(root.rglob("*")):
            if p.suffix.lower() in MIDI_SUFFIXES | {".csv"}:
                out.setdefault(p.stem, p)
        return out

    trans_files = index_dir(trans_dir)
    gt_files = index_dir(gt_dir)
    unmatched = sorted(set(trans_files) ^ set(gt_files))
    for stem in unmatched:
        logger.warning("no matching pair for %r; skipped", stem)
    common = sorted(set(trans_files) & set(gt_files))
    pairs = []
    for stem in common:
        try:
            trans = _load_notes(
                trans_files[stem], include_percussion=not args.exclude_percussion
            )
            truth = _load_notes(
                gt_files[stem], include_percussion=not args.exclude_percussion
            )
        except (MidiParseError, CsvParseError, CliError) as exc:
            logger.warning("skipping %r: %s", stem, exc)
            continue
        pairs.append((trans, truth))
    if not pairs:
        raise CliError("no matched (transcription, ground truth) pairs")
    profile = measure_errors(pairs, threshold_ms=args.threshold_ms)
    write_profile(profile, args.out)
    logger.info("wrote error profile for %d pairs to %s", len(pairs), args.out)
    return 0


# ---------------------------------------------------------------------------
# degrade


def _degrade_once(
    excerpt: Excerpt,
    kind: str,
    config: DegraderConfig,
    rng: RandomSource,
    frame_ms: int,
):
    """Apply one degradation (or the mixture); returns (excerpt, label) or None."""
    if kind == "random":
        outcome = sample_outcome(excerpt, config, rng)
    elif kind in DEGRADATIONS:
        outcome = DEGRADATIONS[kind](
            excerpt, rng, **config.params_for(kind).kwargs_for(kind)
        )
        if outcome is None:
            return None
    else:
        raise CliError(
            f"unknown degradation type {kind!r}; expected 'random' or one of "
            f"{', '.join(DEGRADATION_IDS)}"
        )
    labels = frame_labels(excerpt, outcome.excerpt, frame_ms)
    return outcome, labels


def cmd_degrade(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args.seed)
    config = _mixture_config(args, seed)
    if args.batch:
        return _degrade_batch(args, config)
    if not args.input or not args.out:
        raise CliError("--input and --out are required (or use --batch)")
    excerpt = _load_notes(
        Path(args.input), include_percussion=not args.exclude_percussion
    )
    result = _degrade_once(excerpt, args.type, config, RandomSource(seed), args.frame_ms)
    if result is None:
        logger.warning("degradation %s could not be applied; nothing written", args.type)
        return 1
    outcome, labels = result
    write_csv(outcome.excerpt, args.out)
    labels_path = args.labels_out or str(Path(args.out).with_suffix(".labels.json"))
    _write_label_sidecar(labels_path, outcome.label, labels)
    return 0


def _write_label_sidecar(path: str, label: str, labels: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(
            {"label": label, "frame_labels": "".join(str(int(b)) for b in labels)},
            handle,
        )
        handle.write("\n")


def _degrade_batch(args: argparse.Namespace, config: DegraderConfig) -> int:
    """Process a JSONL request file; one CLI start for many degrade calls."""
    if not args.out_dir:
        raise CliError("--batch requires --out-dir")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = []
    with open(args.batch, "r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                request = json.loads(line)
                item_id = str(request["id"])
                input_path = Path(request["input"])
                kind = str(request.get("type", "random"))
                seed = int(request["seed"])
            except (KeyError, ValueError) as exc:
                raise CliError(f"bad batch request on line {lineno}: {exc}")
            excerpt = _load_notes(
                input_path, include_percussion=not args.exclude_percussion
            )
            result = _degrade_once(
                excerpt, kind, config, RandomSource(seed), args.frame_ms
            )
            if result is None:
                results.append({"id": item_id, "status": "inapplicable"})
                continue
            outcome, labels = result
            out_path = out_dir / f"{item_id}.csv"
            write_csv(outcome.excerpt, out_path)
            results.append(
                {
                    "id": item_id,
                    "status": "ok",
                    "output": str(out_path),
                    "label": outcome.label,
                    "frame_labels": "".join(str(int(b)) for b in labels),
                }
            )
    with open(out_dir / "results.jsonl", "w", encoding="utf-8") as handle:
        for row in results:
            handle.write(json.dumps(row) + "\n")
    return 0


# ---------------------------------------------------------------------------
# encode


def _encode_once(excerpt: Excerpt, fmt: str, frame_ms: int, out_path: Path) -> None:
    q = quantize(excerpt, frame_ms)
    if fmt == "commands":
        write_commands_csv(to_commands(q), out_path)
    elif fmt == "roll":
        write_roll(to_piano_roll(q), out_path)
    else:
        raise CliError(f"unknown format {fmt!r}; expected 'commands' or 'roll'")


def cmd_encode(args: argparse.Namespace) -> int:
    if args.batch:
        if not args.out_dir:
            raise CliError("--batch requires --out-dir")
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        results = []
        suffix = ".csv" if args.format == "commands" else ".roll"
        with open(args.batch, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    request = json.loads(line)
                    item_id = str(request["id"])
                    input_path = Path(request["input"])
                except (KeyError, ValueError) as exc:
                    raise CliError(f"bad batch request on line {lineno}: {exc}")
                excerpt = _load_notes(
                    input_path, include_percussion=not args.exclude_percussion
                )
                out_path = out_dir / f"{item_id}{suffix}"
                _encode_once(excerpt, args.format, args.frame_ms, out_path)
                results.append({"id": item_id, "status": "ok", "output": str(out_path)})
        with open(out_dir / "results.jsonl", "w", encoding="utf-8") as handle:
            for row in results:
                handle.write(json.dumps(row) + "\n")
        return 0
    if not args.input or not args.out:
        raise CliError("--input and --out are required (or use --batch)")
    excerpt = _load_notes(
        Path(args.input), include_percussion=not args.exclude_percussion
    )
    _encode_once(excerpt, args.format, args.frame_ms, Path(args.out))
    return 0


# ---------------------------------------------------------------------------
# evaluate


def _read_prediction_csv(path: Path, value_column: str) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n")
        if header != f"item_id,{value_column}":
            raise CliError(
                f"{path}: expected header 'item_id,{value_column}', got {header!r}"
            )
        for line in handle:
            line = line.rstrip("\n")
            if not line:
                continue
            item_id, value = line.split(",", 1)
            out[item_id] = value
    return out


def _check_ids(pred_ids: set[str], truth_ids: set[str]) -> None:
    missing = sorted(truth_ids - pred_ids)
    extra = sorted(pred_ids - truth_ids)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing predictions for: {', '.join(missing[:5])}")
        if extra:
            parts.append(f"predictions for unknown ids: {', '.join(extra[:5])}")
        raise CliError("; ".join(parts))


def cmd_evaluate(args: argparse.Namespace) -> int:
    task = TASK_NAMES.get(args.task) or (int(args.task) if args.task.isdigit() else None)
    if task not in (1, 2, 3, 4):
        raise CliError(f"unknown task {args.task!r}; expected 1-4 or one of "
                       f"{', '.join(TASK_NAMES)}")
    items = load_dataset(args.dataset, split=args.split)
    if not items:
        raise CliError(f"no items in split {args.split!r} of {args.dataset}")
    by_id = {item.item_id: item for item in items}

    if args.rule_based:
        model_name = "rule-based"
        train_items = load_dataset(args.dataset, split="train")
        if not train_items:
            raise CliError("rule-based predictors need a non-empty train split")
        stats = training_statistics(
            [(it.clean, it.degraded, it.label) for it in train_items], args.frame_ms
        )
        predictor = rule_based_predictor(task, stats)
        report = _evaluate_rule_based(task, items, predictor, args.frame_ms)
    else:
        if not args.predictions:
            raise CliError("either --predictions or --rule-based is required")
        model_name = Path(args.predictions).stem
        report = _evaluate_predictions(task, items, by_id, Path(args.predictions), args)

    metric_name, metric = _headline_metric(report)
    print(f"{'task':<6}{'model':<24}{'metric':>10}")
    print(f"{report.task:<6}{model_name:<24}{metric:>10.3f}")
    if args.out:
        report.write_json(args.out)
    if report.confusion is not None and args.confusion_out:
        report.write_confusion_csv(args.confusion_out)
    logger.info("task %d %s = %.6f", report.task, metric_name, metric)
    return 0


def _headline_metric(report: EvalReport) -> tuple[str, float]:
    for key in ("reverse_f", "accuracy", "frame_f", "mean_helpfulness"):
        if key in report.summary:
            return key, report.summary[key]
    raise AssertionError("report has no headline metric")


def _evaluate_predictions(
    task: int,
    items: list[LabeledExcerpt],
    by_id: dict[str, LabeledExcerpt],
    predictions: Path,
    args: argparse.Namespace,
) -> EvalReport:
    truth_ids = set(by_id)
    if task == 1:
        preds = _read_prediction_csv(predictions, "label")
        _check_ids(set(preds), truth_ids)
        for item_id, value in preds.items():
            if value not in ("degraded", "clean"):
                raise CliError(
                    f"task 1 labels must be 'degraded' or 'clean', got {value!r} "
                    f"for {item_id}"
                )
        ids = sorted(truth_ids)
        value = reverse_f_measure(
            [preds[i] == "degraded" for i in ids],
            [by_id[i].label != NO_DEGRADATION for i in ids],
        )
        return EvalReport(task=1, summary={"reverse_f": value})
    if task == 2:
        preds = _read_prediction_csv(predictions, "label")
        _check_ids(set(preds), truth_ids)
        ids = sorted(truth_ids)
        bad = [i for i in ids if preds[i] not in LABELS]
        if bad:
            raise CliError(f"unknown label {preds[bad[0]]!r} for {bad[0]}")
        result = classification_report([preds[i] for i in ids], [by_id[i].label for i in ids])
        return EvalReport(
            task=2,
            summary={"accuracy": result.accuracy},
            confusion=result.confusion,
            labels=result.labels,
        )
    if task == 3:
        preds = _read_prediction_csv(predictions, "frame_labels")
        _check_ids(set(preds), truth_ids)
        tp = fp = fn = 0
        for item_id in sorted(truth_ids):
            truth = by_id[item_id].frame_labels
            pred_str = preds[item_id]
            if len(pred_str) != len(truth):
                raise CliError(
                    f"{item_id}: prediction has {len(pred_str)} frames, "
                    f"truth has {len(truth)}"
                )
            for p_char, t in zip(pred_str, truth):
                p = p_char == "1"
                if p and t:
                    tp += 1
                elif p:
                    fp += 1
                elif t:
                    fn += 1
        precision, recall, f = _prf_from_counts(tp, fp, fn)
        return EvalReport(
            task=3,
            summary={"precision": precision, "recall": recall, "frame_f": f},
        )
    # Task 4: a directory of corrected excerpt CSVs.
    if not predictions.is_dir():
        raise CliError("task 4 predictions must be a directory of <item_id>.csv files")
    pred_ids = {p.stem for p in predictions.glob("*.csv")}
    _check_ids(pred_ids, truth_ids)
    per_item = {}
    f_c_values = []
    f_g_values = []
    for item_id in sorted(truth_ids):
        item = by_id[item_id]
        corrected = load_csv(predictions / f"{item_id}.csv")
        h, f_c, f_g = helpfulness(
            corrected, item.degraded, item.clean, frame_ms=args.frame_ms
        )
        per_item[item_id] = h
        f_c_values.append(f_c)
        f_g_values.append(f_g)
    mean_h = sum(per_item.values()) / len(per_item)
    return EvalReport(
        task=4,
        summary={
            "mean_helpfulness": mean_h,
            "mean_f_corrected": sum(f_c_values) / len(f_c_values),
            "mean_f_given": sum(f_g_values) / len(f_g_values),
        },
        per_item=per_item,
    )


def _prf_from_counts(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    from .evaluation import _prf

    return _prf(tp, fp, fn)


def _evaluate_rule_based(
    task: int, items: list[LabeledExcerpt], predictor, frame_ms: int
) -> EvalReport:
    if task == 1:
        value = reverse_f_measure(
            [predictor(item.degraded) for item in items],
            [item.label != NO_DEGRADATION for item in items],
        )
        return EvalReport(task=1, summary={"reverse_f": value})
    if task == 2:
        result = classification_report(
            [predictor(item.degraded) for item in items],
            [item.label for item in items],
        )
        return EvalReport(
            task=2,
            summary={"accuracy": result.accuracy},
            confusion=result.confusion,
            labels=result.labels,
        )
    if task == 3:
        tp = fp = fn = 0
        for item in items:
            pred = predictor(len(item.frame_labels))
            tp += int(((pred == 1) & (item.frame_labels == 1)).sum())
            fp += int(((pred == 1) & (item.frame_labels == 0)).sum())
            fn += int(((pred == 0) & (item.frame_labels == 1)).sum())
        precision, recall, f = _prf_from_counts(tp, fp, fn)
        return EvalReport(
            task=3, summary={"precision": precision, "recall": recall, "frame_f": f}
        )
    per_item = {}
    f_c_values = []
    f_g_values = []
    for item in items:
        roll = to_piano_roll(quantize(item.degraded, frame_ms))
        corrected = dequantize(from_piano_roll(predictor(roll), frame_ms))
        h, f_c, f_g = helpfulness(corrected, item.degraded, item.clean, frame_ms=frame_ms)
        per_item[item.item_id] = h
        f_c_values.append(f_c)
        f_g_values.append(f_g)
    return EvalReport(
        task=4,
        summary={
            "mean_helpfulness": sum(per_item.values()) / len(per_item),
            "mean_f_corrected": sum(f_c_values) / len(f_c_values),
            "mean_f_given": sum(f_g_values) / len(f_g_values),
        },
        per_item=per_item,
    )


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdtk",
        description="Degrade symbolic music, profile transcription errors, "
        "build datasets, and evaluate error-detection systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *, seed: bool = True) -> None:
        if seed:
            p.add_argument("--seed", type=int, default=None,
                           help="random seed (default: $MDTK_SEED, then "
                                f"{DEFAULT_SEED})")
        p.add_argument("--frame-ms", type=int, default=40,
                       help="frame length for quantization and labels")
        p.add_argument("--exclude-percussion", action="store_true",
                       help="drop MIDI channel 10 when reading MIDI files")

    p = sub.add_parser("make-dataset", help="build a degraded dataset from MIDI/CSV files")
    p.add_argument("--input", nargs="+", required=True,
                   help="input files or directories (MIDI or note CSV)")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--excerpt-ms", type=int, default=5000)
    p.add_argument("--min-notes", type=int, default=10)
    p.add_argument("--clean-proportion", type=float, default=None,
                   help="fraction left undegraded (default 1/9, or the profile's)")
    p.add_argument("--splits", type=str, default="0.8,0.1,0.1")
    p.add_argument("--profile", type=str, default=None,
                   help="error-profile JSON fixing the degradation mixture")
    p.add_argument("--excerpts-per-piece", type=int, default=1)
    add_common(p)
    _add_degradation_flags(p)
    p.set_defaults(func=cmd_make_dataset)

    p = sub.add_parser("measure-errors", help="profile transcription errors against ground truth")
    p.add_argument("--trans", required=True, help="directory of transcriptions")
    p.add_argument("--gt", required=True, help="directory of ground truths")
    p.add_argument("--threshold-ms", type=int, default=50)
    p.add_argument("--out", required=True, help="output profile JSON path")
    add_common(p, seed=False)
    p.set_defaults(func=cmd_measure_errors)

    p = sub.add_parser("degrade", help="degrade one excerpt (or a batch)")
    p.add_argument("--input", type=str, default=None, help="input MIDI or CSV file")
    p.add_argument("--type", type=str, default="random",
                   help="a degradation name, or 'random' for the mixture")
    p.add_argument("--out", type=str, default=None, help="output CSV path")
    p.add_argument("--labels-out", type=str, default=None,
                   help="sidecar JSON path (default: <out>.labels.json)")
    p.add_argument("--clean-proportion", type=float, default=None)
    p.add_argument("--profile", type=str, default=None)
    p.add_argument("--batch", type=str, default=None,
                   help="JSONL request file: {id, input, type, seed} per line")
    p.add_argument("--out-dir", type=str, default=None, help="batch output directory")
    add_common(p)
    _add_degradation_flags(p)
    p.set_defaults(func=cmd_degrade)

    p = sub.add_parser("encode", help="encode an excerpt as commands or piano roll")
    p.add_argument("--input", type=str, default=None)
    p.add_argument("--format", choices=("commands", "roll"), required=True)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--batch", type=str, default=None,
                   help="JSONL request file: {id, input} per line")
    p.add_argument("--out-dir", type=str, default=None)
    add_common(p, seed=False)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("evaluate", help="score predictions for one of the four tasks")
    p.add_argument("--task", required=True,
                   help="1-4 or detect/classify/locate/correct")
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--predictions", type=str, default=None,
                   help="CSV (tasks 1-3) or directory of CSVs (task 4)")
    p.add_argument("--rule-based", action="store_true",
                   help="evaluate the rule-based reference predictor instead")
    p.add_argument("--split", choices=SPLIT_NAMES, default="test")
    p.add_argument("--out", type=str, default=None, help="report JSON path")
    p.add_argument("--confusion-out", type=str, default=None,
                   help="confusion matrix CSV path (task 2)")
    add_common(p, seed=False)
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        logger.error("%s", exc)
        return 1
    except (MidiParseError, CsvParseError, ProfileError, OSError, ValueError) as exc:
        logger.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
