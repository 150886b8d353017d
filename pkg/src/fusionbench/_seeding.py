"""Deterministic seed derivation and config hashing.

Every stochastic component receives a child seed derived from the global run
seed and a component name, so reruns with the same seed reproduce the whole
pipeline and components stay independent of execution order.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any


def child_seed(seed: int, name: str) -> int:
    """Derive a stable 32-bit child seed from (global seed, component name).

    Uses blake2b over ``"{seed}:{name}"`` so the derivation is identical
    across processes and platforms (unlike Python's salted ``hash``).
    """
    digest = hashlib.blake2b(f"{seed}:{name}".encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def canonical_json(obj: Any) -> str:
    """JSON with sorted keys and fixed separators; stable across runs."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_hash(obj: Any) -> str:
    """sha256 of the canonical JSON encoding of a config-like object."""
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
