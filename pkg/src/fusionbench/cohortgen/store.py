"""Cohort directory layout and integrity-checked round-trip.

Layout: ``schema.json``, ``subjects.csv`` (RFC-4180, one row per subject),
``volumes/<id>.rvf(.json)``, ``masks/<id>.rvf(.json)`` and ``manifest.json``
with a per-file SHA-256 table.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .._seeding import sha256_file
from ..rvf import write_rvf
from .types import EVENT_NAMES, Cohort, EventFlags, FeatureSchema, Subject

FORMAT_VERSION = 1


class CohortStoreError(ValueError):
    """Broken cohort directory: bad version, checksum or missing file."""


def _format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest round-tripping decimal
    return str(value)


def persist_cohort(cohort: Cohort, directory) -> Cohort:
    """Write the full cohort directory; returns the persisted view."""
    directory = Path(directory)
    (directory / "volumes").mkdir(parents=True, exist_ok=True)
    (directory / "masks").mkdir(parents=True, exist_ok=True)

    with open(directory / "schema.json", "w", encoding="utf-8") as fh:
        json.dump(cohort.schema.to_json(), fh, sort_keys=True, indent=1)
        fh.write("\n")

    columns = cohort.schema.names()
    with open(directory / "subjects.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", *columns, *EVENT_NAMES, "label"])
        for s in cohort.subjects:
            row = [s.id]
            row += [_format_value(s.record.get(c)) for c in columns]
            row += ["1" if getattr(s.events, name) else "0" for name in EVENT_NAMES]
            row.append(s.label)
            writer.writerow(row)

    for s in cohort.subjects:
        volume = cohort.volume(s.id)
        mask = cohort.mask(s.id)
        if volume.shape != mask.shape:
            raise CohortStoreError(f"subject {s.id}: volume/mask shape mismatch")
        write_rvf(directory / s.volume_ref, volume.voxels.astype("<f4"), volume.spacing_mm)
        write_rvf(directory / s.mask_ref, mask.voxels.astype("u1"), volume.spacing_mm)

    files = {}
    for path in sorted(directory.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            files[path.relative_to(directory).as_posix()] = sha256_file(path)
    manifest = {
        "format_version": FORMAT_VERSION,
        "provenance": cohort.provenance,
        "n_subjects": len(cohort.subjects),
        "files": files,
    }
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")

    return Cohort(
        schema=cohort.schema,
        subjects=cohort.subjects,
        provenance=cohort.provenance,
        base_dir=directory,
    )


def _parse_value(text: str, kind: str):
    if text == "":
        return None
    return float(text) if kind == "numeric" else text


def load_cohort(directory, verify: bool = True) -> Cohort:
    """Read a cohort directory back; verifies version and file checksums."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise CohortStoreError(f"missing manifest.json in {directory}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise CohortStoreError(f"unsupported cohort format version {version!r}")

    if verify:
        for rel, expected in manifest["files"].items():
            path = directory / rel
            if not path.exists():
                raise CohortStoreError(f"missing file referenced by manifest: {rel}")
            actual = sha256_file(path)
            if actual != expected:
                raise CohortStoreError(f"checksum mismatch for {rel}")

    with open(directory / "schema.json", encoding="utf-8") as fh:
        schema = FeatureSchema.from_json(json.load(fh))

    columns = schema.names()
    subjects = []
    with open(directory / "subjects.csv", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        expected_header = ["id", *columns, *EVENT_NAMES, "label"]
        if header != expected_header:
            raise CohortStoreError("subjects.csv header does not match schema")
        for row in reader:
            sid = row[0]
            record = {
                c: _parse_value(row[1 + i], schema.column(c).kind)
                for i, c in enumerate(columns)
            }
            flag_base = 1 + len(columns)
            events = EventFlags.from_dict(
                {name: row[flag_base + i] == "1" for i, name in enumerate(EVENT_NAMES)}
            )
            subject = Subject(
                id=sid,
                record=record,
                events=events,
                volume_ref=f"volumes/{sid}.rvf",
                mask_ref=f"masks/{sid}.rvf",
            )
            if subject.label != row[-1]:
                raise CohortStoreError(f"subject {sid}: stored label contradicts event flags")
            subjects.append(subject)

    for s in subjects:
        for ref in (s.volume_ref, s.mask_ref):
            if not (directory / ref).exists():
                raise CohortStoreError(f"missing referenced volume file: {ref}")

    return Cohort(
        schema=schema,
        subjects=tuple(subjects),
        provenance=manifest["provenance"],
        base_dir=directory,
    )
