"""Cohort data model: feature schema, adverse-event flags, subjects."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

PHASES = ("demographic", "pre_op", "post_op")

# The nine post-operative events whose occurrence defines an ICU-positive label.
EVENT_NAMES = (
    "cpr",
    "re_intubation",
    "return_to_or",
    "mechanical_ventilation",
    "vasopressor_use",
    "impaired_consciousness",
    "intracranial_hypertension",
    "swallowing_disorder",
    "death",
)

POSITIVE = "positive"
NEGATIVE = "negative"

_RESERVED_COLUMNS = {"id", "label", *EVENT_NAMES}


class SchemaError(ValueError):
    """Invalid feature schema or record."""


@dataclass(frozen=True)
class Column:
    """One tabular feature: numeric, or categorical with fixed levels."""

    name: str
    kind: str  # "numeric" | "categorical"
    phase: str  # "demographic" | "pre_op" | "post_op"
    levels: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("numeric", "categorical"):
            raise SchemaError(f"column {self.name}: unknown kind {self.kind!r}")
        if self.phase not in PHASES:
            raise SchemaError(f"column {self.name}: unknown phase {self.phase!r}")
        if self.kind == "categorical" and len(self.levels) < 2:
            raise SchemaError(f"categorical column {self.name} needs >= 2 levels")
        if self.kind == "numeric" and self.levels:
            raise SchemaError(f"numeric column {self.name} must not declare levels")
        if self.name in _RESERVED_COLUMNS:
            raise SchemaError(f"column name {self.name!r} is reserved")


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered tabular columns; every phase must be represented."""

    columns: tuple[Column, ...]

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate column names in schema")
        present = {c.phase for c in self.columns}
        missing = [p for p in PHASES if p not in present]
        if missing:
            raise SchemaError(f"schema has no column for phase(s): {', '.join(missing)}")

    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        return {
            "columns": [
                {
                    "name": c.name,
                    "kind": c.kind,
                    "phase": c.phase,
                    **({"levels": list(c.levels)} if c.kind == "categorical" else {}),
                }
                for c in self.columns
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FeatureSchema":
        cols = tuple(
            Column(
                name=c["name"],
                kind=c["kind"],
                phase=c["phase"],
                levels=tuple(c.get("levels", ())),
            )
            for c in obj["columns"]
        )
        return cls(columns=cols)


@dataclass(frozen=True)
class EventFlags:
    """Exactly nine independently settable adverse-event flags."""

    cpr: bool = False
    re_intubation: bool = False
    return_to_or: bool = False
    mechanical_ventilation: bool = False
    vasopressor_use: bool = False
    impaired_consciousness: bool = False
    intracranial_hypertension: bool = False
    swallowing_disorder: bool = False
    death: bool = False

    def as_dict(self) -> dict[str, bool]:
        return {name: getattr(self, name) for name in EVENT_NAMES}

    def any(self) -> bool:
        return any(self.as_dict().values())

    @classmethod
    def from_dict(cls, d: dict[str, bool]) -> "EventFlags":
        return cls(**{name: bool(d.get(name, False)) for name in EVENT_NAMES})


assert tuple(f.name for f in fields(EventFlags)) == EVENT_NAMES


def derive_label(events: EventFlags) -> str:
    """ICU label: positive iff at least one of the nine events occurred."""
    return POSITIVE if events.any() else NEGATIVE


@dataclass(frozen=True)
class Subject:
    """One patient: tabular record, volume/mask references, events, label.

    ``label`` is always derived from ``events``; it is stored (and persisted)
    only so files remain self-describing.
    """

    id: str
    record: dict
    events: EventFlags
    volume_ref: str = ""
    mask_ref: str = ""
    label: str = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "label", derive_label(self.events))

    def __eq__(self, other):
        if not isinstance(other, Subject):
            return NotImplemented
        return (
            self.id == other.id
            and self.events == other.events
            and self.volume_ref == other.volume_ref
            and self.mask_ref == other.mask_ref
            and _records_equal(self.record, other.record)
        )


def _records_equal(a: dict, b: dict) -> bool:
    if a.keys() != b.keys():
        return False
    return all(a[k] == b[k] or (a[k] is None and b[k] is None) for k in a)


@dataclass
class Cohort:
    """Schema plus an ordered, uniquely identified list of subjects.

    Synthetic cohorts keep their voxel data in memory until persisted;
    loaded cohorts read volumes lazily through ``base_dir`` + refs.
    """

    schema: FeatureSchema
    subjects: tuple[Subject, ...]
    provenance: dict
    base_dir: object = field(default=None, compare=False, repr=False)
    volume_data: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        ids = [s.id for s in self.subjects]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate subject ids in cohort")

    def ids(self) -> list[str]:
        return [s.id for s in self.subjects]

    def labels(self) -> list[str]:
        return [s.label for s in self.subjects]

    def subject(self, subject_id: str) -> Subject:
        for s in self.subjects:
            if s.id == subject_id:
                return s
        raise KeyError(subject_id)

    def n_positive(self) -> int:
        return sum(1 for s in self.subjects if s.label == POSITIVE)

    def volume(self, subject_id: str):
        """Volume3D for a subject (from memory or from ``base_dir``)."""
        from .. import imaging
        from ..rvf import read_rvf

        if subject_id in self.volume_data:
            return self.volume_data[subject_id][0]
        if self.base_dir is None:
            raise KeyError(f"no volume data for subject {subject_id}")
        from pathlib import Path

        voxels, spacing = read_rvf(Path(self.base_dir) / self.subject(subject_id).volume_ref)
        return imaging.Volume3D(voxels.astype("float32"), spacing)

    def mask(self, subject_id: str):
        """Mask3D for a subject (from memory or from ``base_dir``)."""
        from .. import imaging
        from ..rvf import read_rvf

        if subject_id in self.volume_data:
            return self.volume_data[subject_id][1]
        if self.base_dir is None:
            raise KeyError(f"no mask data for subject {subject_id}")
        from pathlib import Path

        voxels, _ = read_rvf(Path(self.base_dir) / self.subject(subject_id).mask_ref)
        return imaging.Mask3D(voxels.astype(bool))


def default_schema() -> FeatureSchema:
    """The shipped 14-column surrogate schema (see README for the table)."""
    yn = ("no", "yes")
    return FeatureSchema(
        columns=(
            Column("age", "numeric", "demographic"),
            Column("sex", "categorical", "demographic", ("female", "male")),
            Column("asa_score", "categorical", "pre_op", ("1", "2", "3", "4")),
            Column("tumor_entity", "categorical", "pre_op",
                   ("glioma", "meningioma", "metastasis", "other")),
            Column("preop_deficit", "categorical", "pre_op", yn),
            Column("anticoagulation", "categorical", "pre_op", yn),
            Column("surgery_duration_min", "numeric", "post_op"),
            Column("blood_loss_ml", "numeric", "post_op"),
            Column("extubation_delay", "categorical", "post_op", yn),
            Column("crp_mg_l", "numeric", "post_op"),
            Column("leukocytes_g_l", "numeric", "post_op"),
            Column("sodium_mmol_l", "numeric", "post_op"),
            Column("hemoglobin_g_dl", "numeric", "post_op"),
            Column("lactate_mmol_l", "numeric", "post_op"),
        )
    )
