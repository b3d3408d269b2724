"""Portable seeded random numbers.

SplitMix64 (Steele, Lea & Flood 2014) has a single 64-bit word of state and a
few lines of integer arithmetic, so any language can replay the exact stream
from a report's seed. Floats use the top 53 bits of each output.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "splitmix64/f64-top53"

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self, size: int | None = None):
        """Uniform floats in [0, 1)."""
        if size is None:
            return (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return np.array([(self.next_u64() >> 11) * (1.0 / (1 << 53)) for _ in range(size)])

    def uniform(self, low=0.0, high=1.0, size: int | None = None):
        low = np.asarray(low, dtype=float)
        high = np.asarray(high, dtype=float)
        if size is None and low.ndim == 0 and high.ndim == 0:
            return float(low + (high - low) * self.random())
        n = size if size is not None else np.broadcast(low, high).size
        out = low + (high - low) * self.random(n).reshape(np.broadcast(low, high).shape or (n,))
        return out

    def unit_vector(self, dim: int = 3) -> np.ndarray:
        """Uniform direction on the sphere, by rejection from the cube."""
        while True:
            v = self.uniform(-1.0, 1.0, dim)
            r2 = float(v @ v)
            if 1e-4 < r2 <= 1.0:
                return v / np.sqrt(r2)


def as_rng(seed_or_rng) -> SplitMix64:
    if isinstance(seed_or_rng, SplitMix64):
        return seed_or_rng
    return SplitMix64(0 if seed_or_rng is None else seed_or_rng)
