"""Deterministic, platform-independent random stream.

Roadmap sampling must reproduce bit-identical node sets for a given seed on
any platform, so we avoid library generators whose streams may change between
versions and use a counter-based splitmix64 instead.

The stream is defined as a pure function of (seed, index):

    state(i) = (seed + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64
    z = state(i)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9   mod 2^64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB   mod 2^64
    z = z ^ (z >> 31)
    double(i) = (z >> 11) * 2^-53              # uniform in [0, 1)

Counter-based means any slice of the stream can be generated independently,
which keeps rejection sampling deterministic regardless of batch sizes.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_TO_DOUBLE = 2.0 ** -53


def uniform_stream(seed: int, start: int, count: int) -> np.ndarray:
    """Values ``start .. start+count-1`` of the stream for ``seed``, in [0, 1)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    idx = np.arange(start, start + count, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + (idx + np.uint64(1)) * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * _TO_DOUBLE
