"""mdtk: controlled degradation of symbolic music data.

Load note data from MIDI or CSV, inject parameterized errors
(degradations), profile the error mix of a transcription system, build
labeled degraded datasets, and evaluate detection/classification/
location/correction systems.
"""
from .core import (
    CorpusItem,
    CsvParseError,
    Excerpt,
    Note,
    fix_overlaps,
    flatten_tracks,
    load_csv,
    write_csv,
)
from .dataset import DatasetConfig, LabeledExcerpt, build_dataset, extract_excerpt, load_dataset
from .degradations import (
    DEGRADATION_IDS,
    DEGRADATIONS,
    LABELS,
    NO_DEGRADATION,
    DegradationOutcome,
    DegradationParams,
    add_note,
    join_notes,
    offset_shift,
    onset_shift,
    pitch_shift,
    remove_note,
    split_note,
    time_shift,
)
from .degrader import Degrader, DegraderConfig, degrader_from_profile, sample_outcome
from .error_measure import ErrorProfile, measure_errors, read_profile, write_profile
from .evaluation import (
    classification_report,
    frame_based_f,
    frame_f_measure,
    helpfulness,
    note_onset_f,
    reverse_f_measure,
    rule_based_predictor,
    training_statistics,
)
from .formats import (
    PianoRollPair,
    QuantizedExcerpt,
    dequantize,
    frame_labels,
    from_commands,
    from_piano_roll,
    quantize,
    to_commands,
    to_piano_roll,
)
from .midi import MidiParseError, load_midi
from .rng import RandomSource

__version__ = "0.1.0"
