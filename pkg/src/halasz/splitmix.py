"""Counter-based splitmix64 stream used by the random multiplicative models.

The value attached to index ``n`` under ``seed`` is the n-th output of a
splitmix64 generator whose state starts at ``seed``::

    z = seed + n * 0x9E3779B97F4A7C15        (mod 2**64)
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 (mod 2**64)
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB (mod 2**64)
    z = z ^ (z >> 31)

and the uniform variate is ``(z >> 11) * 2**-53`` in [0, 1).
"""

from __future__ import annotations

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def splitmix64(seed: int, n: np.ndarray) -> np.ndarray:
    """Vectorized splitmix64 output at indices ``n`` (uint64 array)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + np.asarray(n, dtype=np.uint64) * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        return z ^ (z >> np.uint64(31))


def uniform(seed: int, n: np.ndarray) -> np.ndarray:
    """Uniform variates in [0, 1) at indices ``n``."""
    return (splitmix64(seed, n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
