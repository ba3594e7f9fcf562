"""Seed plumbing: labelled substreams and counter-based hashing."""
import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def hash64(*keys: int) -> int:
    """Chain splitmix64 over integer keys; stable across platforms and runs."""
    h = 0
    for k in keys:
        h = splitmix64(h ^ (int(k) & MASK64))
    return h


def u53(*keys: int) -> int:
    """Uniform integer in ``[0, 2**53)`` derived from ``keys``."""
    return hash64(*keys) >> 11


def stream(master_seed: int, label: str, *extra: int) -> np.random.Generator:
    """Independent generator for the named substream ``label``."""
    entropy = [int(master_seed) & MASK64, zlib.crc32(label.encode())]
    entropy.extend(int(e) & MASK64 for e in extra)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def substream_seed(master_seed: int, label: str, *extra: int) -> int:
    return hash64(master_seed, zlib.crc32(label.encode()), *extra)
