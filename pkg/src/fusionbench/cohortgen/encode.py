"""Leakage-safe tabular encoding.

Numeric columns are z-scored with statistics computed from training subjects
only; categoricals are one-hot over the schema's fixed level set. Every source
column gets a companion missing-indicator so the encoded width is fixed by the
schema alone. Missing values are imputed with the training median (numeric)
or mode (categorical).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .types import FeatureSchema, Subject

logger = logging.getLogger(__name__)


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class TrainStats:
    """Per-column statistics from the training subjects of one fold."""

    means: dict[str, float]
    stds: dict[str, float]
    medians: dict[str, float]
    modes: dict[str, str]
    source_ids: tuple[str, ...]  # bookkeeping for the leakage audit


def compute_train_stats(subjects: list[Subject], schema: FeatureSchema) -> TrainStats:
    means, stds, medians, modes = {}, {}, {}, {}
    for col in schema.columns:
        values = [s.record.get(col.name) for s in subjects]
        present = [v for v in values if v is not None]
        if col.kind == "numeric":
            arr = np.asarray(present, dtype=float)
            if arr.size == 0:
                means[col.name], stds[col.name], medians[col.name] = 0.0, 1.0, 0.0
                logger.warning("column %s has no observed training values", col.name)
            else:
                means[col.name] = float(arr.mean())
                stds[col.name] = float(arr.std())  # population std
                medians[col.name] = float(np.median(arr))
        else:
            if present:
                counts = {level: 0 for level in col.levels}
                for v in present:
                    if v in counts:
                        counts[v] += 1
                modes[col.name] = max(col.levels, key=lambda lv: (counts[lv], -col.levels.index(lv)))
            else:
                modes[col.name] = col.levels[0]
    return TrainStats(
        means=means, stds=stds, medians=medians, modes=modes,
        source_ids=tuple(s.id for s in subjects),
    )


@dataclass(frozen=True)
class EncodedLayout:
    """Names, source columns and phases for each encoded feature index."""

    feature_names: tuple[str, ...]
    source_columns: tuple[str, ...]
    phases: tuple[str, ...]

    @property
    def width(self) -> int:
        return len(self.feature_names)


def encoded_layout(schema: FeatureSchema) -> EncodedLayout:
    names, sources, phases = [], [], []
    for col in schema.columns:
        if col.kind == "numeric":
            names.append(col.name)
            sources.append(col.name)
            phases.append(col.phase)
        else:
            for level in col.levels:
                names.append(f"{col.name}={level}")
                sources.append(col.name)
                phases.append(col.phase)
        names.append(f"{col.name}__missing")
        sources.append(col.name)
        phases.append(col.phase)
    return EncodedLayout(tuple(names), tuple(sources), tuple(phases))


def encode_record(record: dict, schema: FeatureSchema, stats: TrainStats) -> np.ndarray:
    out = []
    for col in schema.columns:
        value = record.get(col.name)
        missing = value is None
        if col.kind == "numeric":
            if missing:
                value = stats.medians[col.name]
            std = stats.stds[col.name]
            z = 0.0 if std < 1e-12 else (float(value) - stats.means[col.name]) / std
            out.append(z)
        else:
            if missing:
                value = stats.modes[col.name]
            onehot = [0.0] * len(col.levels)
            if value in col.levels:
                onehot[col.levels.index(value)] = 1.0
            else:
                logger.warning("unknown level %r for column %s; encoding all-zeros", value, col.name)
            out.extend(onehot)
        out.append(1.0 if missing else 0.0)
    return np.asarray(out, dtype=np.float64)


def encode_subjects(subjects: list[Subject], schema: FeatureSchema, stats: TrainStats) -> np.ndarray:
    """(n_subjects, layout.width) matrix in subject order."""
    if not subjects:
        return np.zeros((0, encoded_layout(schema).width))
    return np.stack([encode_record(s.record, schema, stats) for s in subjects])


def select_phase(layout: EncodedLayout, schema: FeatureSchema, phases) -> np.ndarray:
    """Indices of encoded features whose source column falls in ``phases``.

    Demographics ride along whenever pre-op data is requested. Ordering
    follows the schema. An empty selection is an error.
    """
    phases = set(phases)
    unknown = phases - {"demographic", "pre_op", "post_op"}
    if unknown:
        raise EncodingError(f"unknown phases: {sorted(unknown)}")
    by_name = {c.name: c for c in schema.columns}
    keep = []
    for i, source in enumerate(layout.source_columns):
        phase = by_name[source].phase
        if phase in phases or (phase == "demographic" and "pre_op" in phases):
            keep.append(i)
    if not keep:
        raise EncodingError(f"phase selection {sorted(phases)} selects no columns")
    return np.asarray(keep, dtype=np.intp)
