"""Stable seed derivation for reproducible parallel streams.

``derive_seed(*parts)`` hashes the ``repr`` of each part, joined with
``"\\x1f"``, using BLAKE2b with an 8-byte digest, and reads the digest as a
big-endian unsigned 64-bit integer. The result depends only on the parts, so
a trial's random stream is independent of scheduling, thread count and the
Python hash seed.
"""
from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(*parts) -> int:
    payload = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
