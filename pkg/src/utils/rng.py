"""
Seeded randomness for reproducible simulations.
"""

import threading

import numpy as np


class RunRng:
    """
    One seeded random stream per run.

    Backed by numpy's PCG64 seeded from a ``SeedSequence``. ``child`` derives
    an independent stream keyed by integers (seller index, buyer index, ...),
    so work can be spread across threads without changing what any single
    stream produces. Draws are serialized by a lock.
    """

    def __init__(self, seed: int, *spawn_key: int):
        self.seed = int(seed) % 2**64
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(sequence))
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"RunRng(seed={self.seed}, spawn_key={self.spawn_key})"

    def child(self, *keys: int) -> "RunRng":
        return RunRng(self.seed, *self.spawn_key, *keys)

    def bytes(self, n: int) -> bytes:
        with self._lock:
            return self._gen.bytes(n)

    def next_u64(self) -> int:
        return int.from_bytes(self.bytes(8), "big")

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in [low, high)."""
        with self._lock:
            return int(self._gen.integers(low, high))

    def uniform(self, low: float, high: float, size: int) -> np.ndarray:
        with self._lock:
            return self._gen.uniform(low, high, size)

    def randbelow(self, bound: int) -> int:
        """Uniform big integer in [0, bound); 64 extra bits keep the modulo bias negligible."""
        if bound < 1:
            raise ValueError("bound must be positive")
        width = (bound.bit_length() + 7) // 8 + 8
        return int.from_bytes(self.bytes(width), "big") % bound

    def shuffled(self, items: list) -> list:
        with self._lock:
            order = self._gen.permutation(len(items))
        return [items[i] for i in order]
