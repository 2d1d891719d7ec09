"""Deterministic, seedable randomness shared by every stochastic operation.

All sampling in the library goes through :class:`RandomSource` so that a
fixed seed plus a fixed call sequence reproduces results exactly, on any
platform.  Independent streams for parallel work are derived with
:meth:`RandomSource.split` rather than by arithmetic on the seed value.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["RandomSource"]


class RandomSource:
    """A seeded PCG64 stream with a spawnable key for sub-streams.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit root seed.
    spawn_key : tuple of int, optional
        Path of :meth:`split` indices from the root stream.  Two sources
        with the same seed but different spawn keys are statistically
        independent.
    """

    __slots__ = ("seed", "spawn_key", "_gen")

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        if not 0 <= int(seed) < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def split(self, index: int) -> "RandomSource":
        """Derive an independent stream; does not advance this stream."""
        return RandomSource(self.seed, self.spawn_key + (int(index),))

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return float(self._gen.random())

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n). Requires n >= 1."""
        if n < 1:
            raise ValueError(f"integer() needs n >= 1, got {n}")
        return int(self._gen.integers(0, n))

    def choose(self, items: Sequence):
        """Uniformly pick one element of a non-empty sequence."""
        return items[self.integer(len(items))]

    def weighted_index(self, weights: Sequence[float]) -> int:
        """Pick an index with probability proportional to its weight.

        Implemented as a single uniform draw against the cumulative sum,
        keeping the stream layout independent of numpy internals.
        """
        cum = np.cumsum(np.asarray(weights, dtype=np.float64))
        total = cum[-1]
        if not total > 0:
            raise ValueError("weights must have positive total mass")
        r = self.random() * total
        return int(np.searchsorted(cum, r, side="right").clip(0, len(cum) - 1))

    def permutation(self, n: int) -> np.ndarray:
        """A uniform random permutation of range(n)."""
        return self._gen.permutation(n)

    def subset(self, n: int, k: int) -> np.ndarray:
        """k distinct integers drawn uniformly from range(n), sorted."""
        picked = self._gen.choice(n, size=k, replace=False)
        return np.sort(picked)

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed}, spawn_key={self.spawn_key})"
