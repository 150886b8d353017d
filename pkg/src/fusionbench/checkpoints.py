"""Single-file binary checkpoints for the neural models.

Layout: 4-byte magic ``FBCK``, uint32-LE format version, uint64-LE header
length, UTF-8 JSON header, then a contiguous little-endian float32 parameter
blob. The header records architecture id, config hash, seed, fold and the
ordered parameter manifest (name + shape), so a checkpoint can be reloaded
without pickling anything.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"FBCK"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    """Unreadable or incompatible checkpoint file."""


def save_checkpoint(path, architecture: str, state: dict[str, np.ndarray], *,
                    config_hash: str, seed: int, fold: int | None = None,
                    extra: dict | None = None) -> None:
    """Write named float32 arrays plus metadata to a single binary file."""
    params = []
    blobs = []
    for name, arr in state.items():
        arr32 = np.ascontiguousarray(arr, dtype="<f4")
        params.append({"name": name, "shape": [int(s) for s in arr.shape]})
        blobs.append(arr32.tobytes())
    header = {
        "architecture": architecture,
        "config_hash": config_hash,
        "seed": int(seed),
        "fold": fold,
        "dtype": "f32-le",
        "params": params,
    }
    if extra:
        header["extra"] = extra
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(header_bytes)))
        fh.write(header_bytes)
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Read a checkpoint; returns (header, name -> float32 array)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CheckpointError(f"{path}: not a checkpoint file (magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != FORMAT_VERSION:
            raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
        (header_len,) = struct.unpack("<Q", fh.read(8))
        header = json.loads(fh.read(header_len).decode("utf-8"))
        state: dict[str, np.ndarray] = {}
        for spec in header["params"]:
            shape = tuple(int(s) for s in spec["shape"])
            count = int(np.prod(shape)) if shape else 1
            raw = fh.read(count * 4)
            if len(raw) != count * 4:
                raise CheckpointError(f"{path}: truncated parameter blob at {spec['name']}")
            state[spec["name"]] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
        if fh.read(1):
            raise CheckpointError(f"{path}: trailing bytes after parameter blob")
    return header, state
