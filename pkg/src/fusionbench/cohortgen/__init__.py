"""Cohort data model, nine-event labeling, synthetic generation, encoding."""

from .encode import (
    EncodedLayout,
    EncodingError,
    TrainStats,
    compute_train_stats,
    encode_record,
    encode_subjects,
    encoded_layout,
    select_phase,
)
from .generate import SignalStrengths, SynthConfig, SynthConfigError, generate_cohort
from .store import CohortStoreError, load_cohort, persist_cohort
from .types import (
    EVENT_NAMES,
    NEGATIVE,
    PHASES,
    POSITIVE,
    Cohort,
    Column,
    EventFlags,
    FeatureSchema,
    SchemaError,
    Subject,
    default_schema,
    derive_label,
)

__all__ = [
    "EVENT_NAMES",
    "NEGATIVE",
    "PHASES",
    "POSITIVE",
    "Cohort",
    "CohortStoreError",
    "Column",
    "EncodedLayout",
    "EncodingError",
    "EventFlags",
    "FeatureSchema",
    "SchemaError",
    "SignalStrengths",
    "Subject",
    "SynthConfig",
    "SynthConfigError",
    "TrainStats",
    "compute_train_stats",
    "default_schema",
    "derive_label",
    "encode_record",
    "encode_subjects",
    "encoded_layout",
    "generate_cohort",
    "load_cohort",
    "persist_cohort",
    "select_phase",
]
