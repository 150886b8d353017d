"""Stratified k-fold assignment by label and tumor-volume bin.

Within each label, strata are chained in bin order and dealt round-robin to
folds, which bounds both the per-fold label count and every per-stratum count
within +/-1 of proportional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .. import imaging
from ..cohortgen import POSITIVE, Cohort


class FoldError(ValueError):
    pass


@dataclass(frozen=True)
class FoldPlan:
    """Subject -> fold assignment plus the strata used to build it."""

    k: int
    assignment: dict[str, int]
    strata: dict[str, tuple[str, int]]  # id -> (label, volume bin)
    seed: int

    def fold_ids(self, fold: int, cohort_ids: list[str]) -> list[str]:
        return [sid for sid in cohort_ids if self.assignment[sid] == fold]

    def train_ids(self, fold: int, cohort_ids: list[str]) -> list[str]:
        return [sid for sid in cohort_ids if self.assignment[sid] != fold]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "seed": self.seed,
            "assignment": dict(sorted(self.assignment.items())),
            "strata": {sid: list(v) for sid, v in sorted(self.strata.items())},
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FoldPlan":
        return cls(
            k=int(obj["k"]),
            assignment={k: int(v) for k, v in obj["assignment"].items()},
            strata={k: (v[0], int(v[1])) for k, v in obj["strata"].items()},
            seed=int(obj["seed"]),
        )

    def save(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, sort_keys=True, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "FoldPlan":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def volume_bins(volumes_mm3: np.ndarray, n_bins: int = 3) -> np.ndarray:
    """Quantile bin index per subject (terciles by default) over the cohort."""
    edges = np.quantile(volumes_mm3, [(i + 1) / n_bins for i in range(n_bins - 1)])
    return np.searchsorted(edges, volumes_mm3, side="right")


def stratified_kfold(cohort: Cohort, k: int = 5, n_volume_bins: int = 3,
                     seed: int = 0, tumor_volumes: dict[str, float] | None = None) -> FoldPlan:
    """Stratify by (label, tumor-volume bin); deterministic given the seed.

    ``tumor_volumes`` lets callers pass precomputed volumes; otherwise they
    are derived from each subject's mask.
    """
    ids = cohort.ids()
    if k < 2:
        raise FoldError(f"k must be >= 2, got {k}")
    if k > len(ids):
        raise FoldError(f"k={k} exceeds cohort size {len(ids)}")

    if tumor_volumes is None:
        tumor_volumes = {}
        for s in cohort.subjects:
            mask = cohort.mask(s.id)
            volume = cohort.volume(s.id)
            tumor_volumes[s.id] = imaging.tumor_volume_mm3(mask, volume.spacing_mm)
    vols = np.asarray([tumor_volumes[sid] for sid in ids], dtype=float)
    bins = volume_bins(vols, n_volume_bins)

    rng = np.random.default_rng(seed)
    labels = cohort.labels()
    strata = {sid: (labels[i], int(bins[i])) for i, sid in enumerate(ids)}

    assignment: dict[str, int] = {}
    for label in (POSITIVE, "negative"):
        next_fold = 0
        for b in range(n_volume_bins):
            members = [sid for i, sid in enumerate(ids)
                       if labels[i] == label and bins[i] == b]
            members = list(np.asarray(members)[rng.permutation(len(members))])
            for sid in members:
                assignment[sid] = next_fold
                next_fold = (next_fold + 1) % k
    if len(assignment) != len(ids):
        raise FoldError("internal error: assignment does not cover the cohort")

    counts = np.bincount(list(assignment.values()), minlength=k)
    if counts.min() == 0:
        raise FoldError(f"fold with zero subjects (cohort of {len(ids)} over k={k})")

    return FoldPlan(k=k, assignment=assignment, strata=strata, seed=seed)
