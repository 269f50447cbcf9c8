"""Seeded random source used by the CLI and the scheme operations.

SplitMix64 keeps a single 64-bit state ``s``. Each draw performs::

    s = (s + 0x9E3779B97F4A7C15) mod 2**64
    z = s
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    return z ^ (z >> 31)

``getrandbits(k)`` concatenates ceil(k/64) draws big-endian (first draw most
significant) and keeps the top ``k`` bits. The rule is simple enough to port
to any language, which is what makes CLI output reproducible across platforms.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def getrandbits(self, k: int) -> int:
        if k < 0:
            raise ValueError("number of bits must be non-negative")
        if k == 0:
            return 0
        words = -(-k // 64)
        acc = 0
        for _ in range(words):
            acc = (acc << 64) | self.next_u64()
        return acc >> (64 * words - k)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        k = (n - 1).bit_length()
        while True:
            r = self.getrandbits(k)
            if r < n:
                return r

    def random(self) -> float:
        return self.getrandbits(53) / (1 << 53)

    def spawn(self) -> "SplitMix64":
        """Independent child stream (for per-trial streams derived from one root seed)."""
        return SplitMix64(self.next_u64())

    def numpy(self) -> np.random.Generator:
        return np.random.default_rng(self.next_u64())


def as_generator(rng) -> np.random.Generator:
    """Accept a numpy Generator, a SplitMix64, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, SplitMix64):
        return rng.numpy()
    return np.random.default_rng(rng)
