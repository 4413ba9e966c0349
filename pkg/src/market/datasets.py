"""
Synthetic seller datasets: CSV rows of float64 values.
"""

import numpy as np

from ..utils.rng import RunRng

# Not a number, a single record: fails every built-in evaluation.
FAILING_DATA = b"n/a\n"


def _render(values: np.ndarray) -> bytes:
    lines = [",".join(f"{v:.6f}" for v in row) for row in values]
    return ("\n".join(lines) + "\n").encode("utf-8")


def synthetic_rows(rng: RunRng, records: int, width: int = 3, low: float = 0.0, high: float = 100.0) -> bytes:
    if records < 1 or width < 1:
        raise ValueError("records and width must be positive")
    return _render(rng.uniform(low, high, records * width).reshape(records, width))


def synthetic_item(rng: RunRng, size: int, width: int = 3) -> bytes:
    """Whole CSV rows totalling at least ``size`` bytes."""
    if size < 1:
        raise ValueError("size must be positive")
    # Rows render to roughly 10 bytes per field.
    records = max(1, size // (10 * width) + 1)
    data = synthetic_rows(rng, records, width)
    while len(data) < size:
        data += synthetic_rows(rng, records, width)
    return data
