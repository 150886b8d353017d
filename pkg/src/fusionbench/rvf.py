"""RVF raw-volume files: a JSON sidecar header plus a raw little-endian payload.

``<name>.rvf.json`` holds ``{shape, spacing_mm, dtype, order}`` and the
``<name>.rvf`` file holds exactly ``prod(shape)`` elements in C order.
Supported dtypes are ``f32-le`` and ``u8-le``.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

_DTYPES = {"f32-le": np.dtype("<f4"), "u8-le": np.dtype("u1")}


class RVFError(ValueError):
    """Malformed or inconsistent RVF header/payload."""


def _dtype_name(arr: np.ndarray) -> str:
    for name, dt in _DTYPES.items():
        if arr.dtype == dt:
            return name
    raise RVFError(f"unsupported dtype {arr.dtype}; use float32 or uint8")


def write_rvf(path, voxels: np.ndarray, spacing_mm, provenance: dict | None = None) -> None:
    """Write a 3-D array as an RVF payload + header pair."""
    path = Path(path)
    if voxels.ndim != 3:
        raise RVFError(f"expected a 3-D array, got shape {voxels.shape}")
    voxels = np.ascontiguousarray(voxels)
    header = {
        "shape": [int(s) for s in voxels.shape],
        "spacing_mm": [float(s) for s in spacing_mm],
        "dtype": _dtype_name(voxels),
        "order": "C",
    }
    if provenance is not None:
        header["provenance"] = provenance
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(header, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    voxels.tofile(path)


def read_rvf(path) -> tuple[np.ndarray, tuple[float, float, float]]:
    """Read an RVF pair; returns (voxels, spacing_mm)."""
    path = Path(path)
    header_path = Path(str(path) + ".json")
    if not header_path.exists():
        raise RVFError(f"missing RVF header {header_path}")
    with open(header_path, encoding="utf-8") as fh:
        header = json.load(fh)
    shape = tuple(int(s) for s in header["shape"])
    if len(shape) != 3:
        raise RVFError(f"{header_path}: shape must have 3 axes, got {shape}")
    if header.get("order", "C") != "C":
        raise RVFError(f"{header_path}: only C order is supported")
    try:
        dtype = _DTYPES[header["dtype"]]
    except KeyError:
        raise RVFError(f"{header_path}: unknown dtype {header.get('dtype')!r}") from None
    data = np.fromfile(path, dtype=dtype)
    expected = int(np.prod(shape))
    if data.size != expected:
        raise RVFError(f"{path}: payload has {data.size} elements, header implies {expected}")
    spacing = tuple(float(s) for s in header["spacing_mm"])
    return data.reshape(shape), spacing
