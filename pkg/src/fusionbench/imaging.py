"""Volume and mask geometry: normalization, tumor volume, slice and ROI picks.

All operations are pure functions over dense voxel grids with (z, y, x) axis
order and per-axis spacing in millimetres.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ImagingError(ValueError):
    """Invalid volume/mask input for a geometry operation."""


@dataclass(frozen=True)
class Volume3D:
    """Dense scalar grid with positive per-axis spacing (z, y, x), in mm."""

    voxels: np.ndarray
    spacing_mm: tuple[float, float, float]

    def __post_init__(self):
        if self.voxels.ndim != 3:
            raise ImagingError(f"volume must be 3-D, got shape {self.voxels.shape}")
        spacing = tuple(float(s) for s in self.spacing_mm)
        if any(s <= 0 for s in spacing):
            raise ImagingError(f"spacing must be positive, got {spacing}")
        object.__setattr__(self, "spacing_mm", spacing)
        if not np.all(np.isfinite(self.voxels)):
            raise ImagingError("volume contains non-finite values")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.voxels.shape


@dataclass(frozen=True)
class Mask3D:
    """Binary grid aligned with its paired volume."""

    voxels: np.ndarray

    def __post_init__(self):
        if self.voxels.ndim != 3:
            raise ImagingError(f"mask must be 3-D, got shape {self.voxels.shape}")
        object.__setattr__(self, "voxels", self.voxels.astype(bool))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.voxels.shape

    def count(self) -> int:
        return int(self.voxels.sum())


@dataclass(frozen=True)
class ROI3D:
    """Cube (in mm) extracted around the tumor centroid; outside is zero."""

    voxels: np.ndarray
    side_mm: float
    origin_voxel: tuple[int, int, int]


def normalize_intensity(volume: Volume3D) -> Volume3D:
    """Z-score the nonzero (foreground) voxels; background stays exactly 0.

    Idempotent up to float rounding. Raises on (near-)constant foreground.
    """
    voxels = volume.voxels
    fg = voxels != 0
    n_fg = int(fg.sum())
    if n_fg < 2:
        raise ImagingError("volume has fewer than 2 foreground voxels")
    values = voxels[fg].astype(np.float64)
    mean = values.mean()
    std = values.std()
    if std < 1e-12:
        raise ImagingError("constant foreground intensity; cannot normalize")
    out = np.zeros_like(voxels, dtype=np.float32)
    out[fg] = ((values - mean) / std).astype(np.float32)
    return Volume3D(out, volume.spacing_mm)


def tumor_volume_mm3(mask: Mask3D, spacing_mm) -> float:
    """Foreground voxel count times the single-voxel volume in mm^3."""
    voxel_volume = float(np.prod([float(s) for s in spacing_mm]))
    return mask.count() * voxel_volume


def _boundary_pixels(slice_mask: np.ndarray) -> np.ndarray:
    """(n, 2) array of (y, x) mask pixels with at least one off-mask 4-neighbour."""
    m = slice_mask
    interior = np.zeros_like(m)
    interior[1:-1, 1:-1] = (
        m[1:-1, 1:-1] & m[:-2, 1:-1] & m[2:, 1:-1] & m[1:-1, :-2] & m[1:-1, 2:]
    )
    return np.argwhere(m & ~interior)


def _feret_diameter_mm(slice_mask: np.ndarray, spacing_yx) -> float:
    """Max pairwise distance between mask pixel centers, in mm.

    The maximising pair lies on the boundary, so only boundary pixels are
    compared (brute force; masks are desk-scale).
    """
    pts = _boundary_pixels(slice_mask).astype(np.float64)
    if len(pts) == 0:
        return -1.0
    if len(pts) == 1:
        return 0.0
    pts = pts * np.asarray(spacing_yx, dtype=np.float64)
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())


def select_largest_tumor_slice(volume: Volume3D, mask: Mask3D) -> tuple[int, np.ndarray]:
    """Axial slice with the largest in-plane tumor Feret diameter.

    Ties break toward the smallest z index. Returns (z, normalized 2-D slice).
    """
    if volume.shape != mask.shape:
        raise ImagingError(f"volume shape {volume.shape} != mask shape {mask.shape}")
    if mask.count() == 0:
        raise ImagingError("empty mask: no tumor slice to select")
    spacing_yx = volume.spacing_mm[1:]
    best_z = -1
    best_diameter = -1.0
    for z in range(mask.shape[0]):
        d = _feret_diameter_mm(mask.voxels[z], spacing_yx)
        if d > best_diameter:
            best_diameter = d
            best_z = z
    normalized = normalize_intensity(volume)
    return best_z, normalized.voxels[best_z]


def mask_centroid_voxel(mask: Mask3D) -> tuple[int, int, int]:
    """Center of mass of the foreground, rounded half-up to a voxel index."""
    if mask.count() == 0:
        raise ImagingError("empty mask has no centroid")
    coords = np.argwhere(mask.voxels)
    center = coords.mean(axis=0)
    return tuple(int(np.floor(c + 0.5)) for c in center)


def extract_roi(volume: Volume3D, mask: Mask3D, side_mm: float = 160.0) -> ROI3D:
    """Cube of ``side_mm`` per axis centered on the mask centroid.

    Per-axis voxel count is round(side_mm / spacing); regions outside the
    volume are zero-filled.
    """
    if side_mm <= 0:
        raise ImagingError(f"side_mm must be positive, got {side_mm}")
    if volume.shape != mask.shape:
        raise ImagingError(f"volume shape {volume.shape} != mask shape {mask.shape}")
    centroid = mask_centroid_voxel(mask)
    counts = [int(np.floor(side_mm / s + 0.5)) for s in volume.spacing_mm]
    if any(c < 1 for c in counts):
        raise ImagingError(f"side {side_mm} mm is below one voxel at spacing {volume.spacing_mm}")
    starts = [c - n // 2 for c, n in zip(centroid, counts)]
    out = np.zeros(counts, dtype=np.float32)
    src_lo = [max(0, s) for s in starts]
    src_hi = [min(dim, s + n) for dim, s, n in zip(volume.shape, starts, counts)]
    dst_lo = [sl - s for sl, s in zip(src_lo, starts)]
    dst_hi = [dl + (sh - sl) for dl, sl, sh in zip(dst_lo, src_lo, src_hi)]
    if all(hi > lo for lo, hi in zip(src_lo, src_hi)):
        out[dst_lo[0]:dst_hi[0], dst_lo[1]:dst_hi[1], dst_lo[2]:dst_hi[2]] = volume.voxels[
            src_lo[0]:src_hi[0], src_lo[1]:src_hi[1], src_lo[2]:src_hi[2]
        ]
    return ROI3D(voxels=out, side_mm=float(side_mm), origin_voxel=tuple(int(s) for s in starts))
