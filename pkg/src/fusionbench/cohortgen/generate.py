"""Seeded synthetic cohort generator.

Each subject carries a scalar latent risk z ~ N(0, 1). The ICU label is the
top-``n_positive`` subjects by ``a*z + logistic noise`` (so label counts are
exact while label noise keeps the task non-degenerate). Every signal-bearing
feature is a monotone function of z plus independent noise; the three
``signal_strengths`` scale how much of z each modality sees. Tumor appearance
carries the imaging signal through size and contrast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..imaging import Mask3D, Volume3D
from .types import (
    EVENT_NAMES,
    Cohort,
    EventFlags,
    FeatureSchema,
    Subject,
    default_schema,
)


class SynthConfigError(ValueError):
    """Rejected synthetic-cohort configuration."""


@dataclass(frozen=True)
class SignalStrengths:
    """Per-modality signal level in [0, 1]; 0 means pure noise."""

    tabular_pre: float = 0.55
    tabular_post: float = 0.80
    imaging: float = 0.85

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not 0.0 <= value <= 1.0:
                raise SynthConfigError(f"signal strength {name}={value} outside [0, 1]")


@dataclass(frozen=True)
class SynthConfig:
    n_subjects: int = 611
    n_positive: int = 59
    volume_shape: tuple[int, int, int] = (40, 64, 64)
    spacing_mm: tuple[float, float, float] = (4.0, 4.0, 4.0)
    signal_strengths: SignalStrengths = field(default_factory=SignalStrengths)
    seed: int = 42

    def __post_init__(self):
        if not 0 < self.n_positive < self.n_subjects:
            raise SynthConfigError(
                f"need 0 < n_positive < n_subjects, got {self.n_positive}/{self.n_subjects}"
            )
        if any(s <= 0 for s in self.spacing_mm):
            raise SynthConfigError(f"spacing must be positive, got {self.spacing_mm}")
        half_extents = [sh * sp / 2.0 for sh, sp in zip(self.volume_shape, self.spacing_mm)]
        worst_tumor = _TUMOR_R_MAX_MM * (1.0 + _TUMOR_AXIS_JITTER)
        for axis, (half, frac) in enumerate(zip(half_extents, _BRAIN_FRACTIONS)):
            if _TUMOR_OFFSET_FRAC * frac * half + worst_tumor > half:
                raise SynthConfigError(
                    f"volume too small to contain the maximum tumor on axis {axis}: "
                    f"half-extent {half:.1f} mm at spacing {self.spacing_mm[axis]} mm"
                )

    def to_json(self) -> dict:
        return {
            "n_subjects": self.n_subjects,
            "n_positive": self.n_positive,
            "volume_shape": list(self.volume_shape),
            "spacing_mm": list(self.spacing_mm),
            "signal_strengths": dict(self.signal_strengths.__dict__),
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SynthConfig":
        return cls(
            n_subjects=int(obj["n_subjects"]),
            n_positive=int(obj["n_positive"]),
            volume_shape=tuple(int(v) for v in obj["volume_shape"]),
            spacing_mm=tuple(float(v) for v in obj["spacing_mm"]),
            signal_strengths=SignalStrengths(**obj["signal_strengths"]),
            seed=int(obj["seed"]),
        )


# Label noise: higher -> labels track z more tightly.
_RISK_SHARPNESS = 2.6

# Brain ellipsoid semi-axes as fractions of the half-extents.
_BRAIN_FRACTIONS = (0.75, 0.85, 0.80)
_TUMOR_OFFSET_FRAC = 0.45
_TUMOR_R_MIN_MM = 9.0
_TUMOR_R_MAX_MM = 18.0
_TUMOR_AXIS_JITTER = 0.15
_TUMOR_CONTRAST_MIN = 0.25
_TUMOR_CONTRAST_RANGE = 0.55

_MISSING_RATE = 0.02
_MISSING_COLUMNS = ("crp_mg_l", "leukocytes_g_l", "sodium_mmol_l",
                    "hemoglobin_g_dl", "lactate_mmol_l")

# Event draw weights for positive subjects (paper gives no frequencies).
_EVENT_WEIGHTS = np.array([0.05, 0.10, 0.09, 0.22, 0.18, 0.16, 0.08, 0.08, 0.04])

# column -> (rho weight on z, transform); rho is scaled by the phase signal.
# Transforms map the standard-normal generative latent onto a plausible scale.
_NUMERIC_PARAMS = {
    "age": (0.25, lambda y: 62.0 + 13.0 * y),
    "surgery_duration_min": (0.85, lambda y: 230.0 + 65.0 * y),
    "blood_loss_ml": (0.80, lambda y: 320.0 * np.exp(0.55 * y)),
    "crp_mg_l": (0.70, lambda y: 28.0 * np.exp(0.80 * y)),
    "leukocytes_g_l": (0.55, lambda y: 9.5 + 2.8 * y),
    "sodium_mmol_l": (0.15, lambda y: 139.0 + 3.5 * y),
    "hemoglobin_g_dl": (-0.50, lambda y: 12.8 + 1.7 * y),
    "lactate_mmol_l": (0.75, lambda y: 1.1 * np.exp(0.50 * y)),
}

# column -> (rho weight, cumulative level cuts as N(0,1) quantiles).
_CATEGORICAL_PARAMS = {
    "sex": (0.0, (0.5,)),
    "asa_score": (0.90, (0.12, 0.50, 0.85)),
    "tumor_entity": (0.30, (0.45, 0.75, 0.92)),
    "preop_deficit": (0.80, (0.75,)),
    "anticoagulation": (0.45, (0.80,)),
    "extubation_delay": (0.90, (0.85,)),
}


def _phase_strength(phase: str, strengths: SignalStrengths) -> float:
    if phase == "post_op":
        return strengths.tabular_post
    return strengths.tabular_pre  # demographics travel with pre-op data


def _signal_latent(z: np.ndarray, rho: float, rng: np.random.Generator) -> np.ndarray:
    """y = rho*z + sqrt(1-rho^2)*eps, marginally N(0,1), monotone in z."""
    rho = float(np.clip(rho, -1.0, 1.0))
    eps = rng.standard_normal(z.shape)
    return rho * z + np.sqrt(1.0 - rho * rho) * eps


_erf = np.vectorize(math.erf, otypes=[float])


def _norm_cdf(x: np.ndarray) -> np.ndarray:
    """Standard normal CDF (maps the generative latents onto [0, 1])."""
    return 0.5 * (1.0 + _erf(np.asarray(x) / math.sqrt(2.0)))


def generate_cohort(config: SynthConfig, schema: FeatureSchema | None = None) -> Cohort:
    """Build a deterministic synthetic cohort with planted multimodal signal."""
    schema = schema or default_schema()
    rng = np.random.default_rng(config.seed)
    n = config.n_subjects
    ids = [f"s{i:04d}" for i in range(n)]

    z = rng.standard_normal(n)
    label_score = _RISK_SHARPNESS * z + rng.logistic(0.0, 1.0, n)
    order = np.argsort(-label_score, kind="stable")
    positive = np.zeros(n, dtype=bool)
    positive[order[: config.n_positive]] = True

    records = _generate_records(z, schema, config.signal_strengths, rng)
    events = _generate_events(positive, rng)
    volumes = _generate_volumes(z, ids, config, rng)

    subjects = []
    for i, sid in enumerate(ids):
        subjects.append(
            Subject(
                id=sid,
                record={name: records[name][i] for name in schema.names()},
                events=events[i],
                volume_ref=f"volumes/{sid}.rvf",
                mask_ref=f"masks/{sid}.rvf",
            )
        )
        assert (subjects[-1].label == "positive") == bool(positive[i])

    cohort = Cohort(
        schema=schema,
        subjects=tuple(subjects),
        provenance={"kind": "synthetic", "seed": config.seed, "config": config.to_json()},
        volume_data=volumes,
    )
    return cohort


def _generate_records(z, schema, strengths, rng):
    n = len(z)
    records: dict[str, list] = {}
    for col in schema.columns:
        s = _phase_strength(col.phase, strengths)
        if col.kind == "numeric":
            weight, transform = _NUMERIC_PARAMS.get(col.name, (0.0, lambda y: y))
            y = _signal_latent(z, weight * s, rng)
            values = transform(y)
            records[col.name] = [float(v) for v in values]
        else:
            weight, cuts = _CATEGORICAL_PARAMS.get(
                col.name, (0.0, tuple((i + 1) / len(col.levels) for i in range(len(col.levels) - 1)))
            )
            if len(cuts) != len(col.levels) - 1:
                cuts = tuple((i + 1) / len(col.levels) for i in range(len(col.levels) - 1))
            y = _signal_latent(z, weight * s, rng)
            u = _norm_cdf(y)
            idx = np.searchsorted(np.asarray(cuts), u, side="right")
            records[col.name] = [col.levels[int(i)] for i in idx]
    # sprinkle missing values into the lab columns so imputation is exercised
    for name in _MISSING_COLUMNS:
        if name in records:
            miss = rng.random(n) < _MISSING_RATE
            records[name] = [None if m else v for v, m in zip(records[name], miss)]
    return records


def _generate_events(positive: np.ndarray, rng) -> list[EventFlags]:
    weights = _EVENT_WEIGHTS / _EVENT_WEIGHTS.sum()
    out = []
    for is_pos in positive:
        if not is_pos:
            out.append(EventFlags())
            continue
        k = 1 + rng.binomial(2, 0.35)
        chosen = rng.choice(len(EVENT_NAMES), size=int(k), replace=False, p=weights)
        out.append(EventFlags.from_dict({EVENT_NAMES[int(c)]: True for c in chosen}))
    return out


def _generate_volumes(z, ids, config: SynthConfig, rng):
    shape = tuple(config.volume_shape)
    spacing = tuple(config.spacing_mm)
    s_img = config.signal_strengths.imaging
    half = np.array([sh * sp / 2.0 for sh, sp in zip(shape, spacing)])
    brain_semi = half * np.asarray(_BRAIN_FRACTIONS)

    # voxel-center coordinates relative to the volume center, in mm
    grids = np.meshgrid(
        *[(np.arange(sh) - (sh - 1) / 2.0) * sp for sh, sp in zip(shape, spacing)],
        indexing="ij",
    )

    size_latent = _signal_latent(z, 0.90 * s_img, rng)
    contrast_latent = _signal_latent(z, 0.85 * s_img, rng)
    size_u = _norm_cdf(size_latent)
    contrast_u = _norm_cdf(contrast_latent)

    volumes = {}
    for i, sid in enumerate(ids):
        jitter = 1.0 + 0.05 * rng.uniform(-1.0, 1.0, 3)
        semi = brain_semi * jitter
        r2_brain = sum((g / a) ** 2 for g, a in zip(grids, semi))
        brain = r2_brain <= 1.0

        base = 0.62 * (1.0 - 0.28 * r2_brain) + 0.04 * rng.standard_normal(shape)
        voxels = np.where(brain, np.maximum(base, 0.02), 0.0)

        center = rng.uniform(-_TUMOR_OFFSET_FRAC, _TUMOR_OFFSET_FRAC, 3) * semi
        radius = _TUMOR_R_MIN_MM + (_TUMOR_R_MAX_MM - _TUMOR_R_MIN_MM) * size_u[i]
        axes = radius * (1.0 + _TUMOR_AXIS_JITTER * rng.uniform(-1.0, 1.0, 3))
        r2_tumor = sum(((g - c) / a) ** 2 for g, c, a in zip(grids, center, axes))
        tumor = r2_tumor <= 1.0

        contrast = _TUMOR_CONTRAST_MIN + _TUMOR_CONTRAST_RANGE * contrast_u[i]
        voxels = np.where(tumor, voxels + contrast, voxels)

        assert tumor.any(), "generated tumor mask is empty"
        volumes[sid] = (
            Volume3D(voxels.astype(np.float32), spacing),
            Mask3D(tumor),
        )
    return volumes
