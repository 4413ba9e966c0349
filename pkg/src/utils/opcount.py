"""
Deterministic operation counters.

Wall time is hardware dependent; the counts recorded here are not. Any code
path can call ``record`` and the counts land in every ``counting()`` block
that is active in the current context (blocks nest).
"""

import threading
from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional


class OpCounts:
    """Thread-safe counter that forwards every increment to its parent."""

    def __init__(self, parent: Optional["OpCounts"] = None):
        self.parent = parent
        self._counts: Counter = Counter()
        self._lock = threading.Lock()

    def add(self, name: str, n: int = 1):
        with self._lock:
            self._counts[name] += n
        if self.parent is not None:
            self.parent.add(name, n)

    def get(self, name: str) -> int:
        with self._lock:
            return self._counts.get(name, 0)

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return dict(sorted(self._counts.items()))

    def total(self, *names: str) -> int:
        snap = self.snapshot()
        if not names:
            return sum(snap.values())
        return sum(snap.get(name, 0) for name in names)


_active: ContextVar[Optional[OpCounts]] = ContextVar("yotta_opcounts", default=None)


@contextmanager
def counting() -> Iterator[OpCounts]:
    """Collect operation counts for the enclosed block."""
    counts = OpCounts(parent=_active.get())
    token = _active.set(counts)
    try:
        yield counts
    finally:
        _active.reset(token)


def record(name: str, n: int = 1):
    counts = _active.get()
    if counts is not None:
        counts.add(name, n)


def format_ops(ops: dict[str, int]) -> str:
    """Compact ``name=value;...`` rendering used in CSV output."""
    return ";".join(f"{name}={value}" for name, value in sorted(ops.items()))
