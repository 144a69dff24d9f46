"""Seed derivation.

All randomness goes through numpy's PCG64 bit generator.  A stream is
identified by a master seed plus a path of tags and integer indices; the
path is hashed into a ``SeedSequence`` spawn key so that any stage can be
re-run in isolation and get the same numbers.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode("utf-8"))


def seed_sequence(seed: int, *path) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed) & ((1 << 64) - 1),
                                  spawn_key=tuple(_key(p) for p in path))


def make_rng(seed: int, *path) -> np.random.Generator:
    """Independent PCG64 generator for ``(seed, *path)``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *path)))


def derive_seed(seed: int, *path) -> int:
    """A 64-bit integer seed for ``(seed, *path)``, for APIs that take ints."""
    return int(seed_sequence(seed, *path).generate_state(1, dtype=np.uint64)[0])
