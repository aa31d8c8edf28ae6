"""Deterministic derivation of sub-stream seeds.

Every randomized stage of the pipeline gets its RNG seed from
derive_seed(base_seed, *parts): SHA-256 over repr((base_seed, *parts)),
first 8 bytes big-endian, interpreted as uint64. This keeps sweeps and
Monte-Carlo chunk schedules reproducible across runs, platforms, and
worker counts.
"""

from __future__ import annotations

import hashlib


def derive_seed(base_seed: int, *parts: int | str) -> int:
    key = repr((int(base_seed),) + tuple(parts)).encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big")
