"""Counter-addressed random streams.

Every draw is a pure function of ``(seed, label, counter)``: the Philox
key is derived from the seed and the stream label, and the round (or
attempt, realization, iteration) index selects a disjoint block of the
Philox counter space.  Nothing is carried between calls, so round ``t``
can be regenerated at any time without replaying rounds ``0..t-1``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

__all__ = ["Stream", "derive_key"]


def derive_key(seed: int, label: str) -> np.ndarray:
    """128-bit Philox key for the stream ``(seed, label)``."""
    digest = hashlib.blake2b(f"{int(seed)}\x1f{label}".encode(), digest_size=16).digest()
    return np.frombuffer(digest, dtype="<u8").astype(np.uint64)


@dataclass(frozen=True)
class Stream:
    seed: int
    label: str

    def generator(self, counter: int, lane: int = 0) -> np.random.Generator:
        """Fresh generator positioned at block ``(counter, lane)``."""
        if counter < 0 or lane < 0:
            raise ValueError("counter and lane must be nonnegative")
        ctr = np.array([0, 0, counter, lane], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=derive_key(self.seed, self.label), counter=ctr))

    def uniform(self, counter: int, size: int, lane: int = 0) -> np.ndarray:
        """``size`` draws in [0, 1); entry ``i`` depends only on (seed, label, counter, lane, i)."""
        return self.generator(counter, lane).random(size)

    def normal(self, counter: int, size: int) -> np.ndarray:
        return self.generator(counter, lane=1).standard_normal(size)

    def rademacher(self, counter: int, size: int) -> np.ndarray:
        u = self.uniform(counter, size, lane=2)
        return np.where(u < 0.5, -1.0, 1.0)
