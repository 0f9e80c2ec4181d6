"""Counter-based random streams.

A stream is identified by a master seed plus a tuple of integer keys. The
keys feed ``numpy.random.SeedSequence.spawn_key`` and the resulting state
seeds a Philox generator, so the stream for ``(seed, 3, 7)`` is the same no
matter which process builds it or in what order streams are requested.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 123456789


class RandomStream:
    """A deterministic, independently splittable source of randomness."""

    def __init__(self, seed: int = DEFAULT_SEED, key: tuple[int, ...] = ()):
        if seed < 0 or seed >= 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self.generator = np.random.Generator(np.random.Philox(ss))

    def substream(self, *key: int) -> "RandomStream":
        """Child stream addressed by ``key``, independent of this stream's state."""
        return RandomStream(self.seed, self.key + tuple(key))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def standard_exponential(self, size=None):
        return self.generator.standard_exponential(size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, key={self.key})"
