"""
Evaluation functions F: public predicates a dataset must satisfy.

Datasets are CSV-like UTF-8 text; a record is a non-empty line. Eval ids are
strings of the form ``<kind>:<params>``:

    min-records:<N>                 at least N records
    schema:csv:f64x<K>              every record has K finite float64 fields
    mean-in-range:col<I>:<lo>:<hi>  mean of column I lies in [lo, hi]

``register_eval`` adds further kinds.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..utils.errors import UnknownEval
from ..utils.opcount import record

Predicate = Callable[[bytes], bool]


@dataclass(frozen=True)
class EvalFunction:
    eval_id: str
    predicate: Predicate = field(repr=False, compare=False)
    description: str = ""

    def __call__(self, data: bytes) -> bool:
        """Total: malformed input or an internal error yields False."""
        record("predicate_evals")
        try:
            return bool(self.predicate(data))
        except Exception:
            return False


def split_records(data: bytes) -> Optional[list[str]]:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        return None
    return [line.strip() for line in text.splitlines() if line.strip()]


def parse_table(data: bytes) -> Optional[np.ndarray]:
    """
    Records as a 2-D float64 array.

    None when there are no records, rows differ in width, or a field is not a
    finite number.
    """
    records = split_records(data)
    if not records:
        return None
    try:
        table = np.array([[float(cell) for cell in line.split(",")] for line in records], dtype=np.float64)
    except ValueError:
        return None
    if table.ndim != 2 or not np.all(np.isfinite(table)):
        return None
    return table


def _min_records(params: str) -> EvalFunction:
    threshold = int(params)
    if threshold < 0:
        raise ValueError("threshold must be non-negative")

    def predicate(data: bytes) -> bool:
        records = split_records(data)
        return records is not None and len(records) >= threshold

    return EvalFunction(f"min-records:{threshold}", predicate, f"at least {threshold} records")


def _schema(params: str) -> EvalFunction:
    fmt, _, shape = params.partition(":")
    if fmt != "csv" or not shape.startswith("f64x"):
        raise ValueError(f"unsupported schema {params!r}")
    width = int(shape[len("f64x"):])
    if width < 1:
        raise ValueError("schema width must be positive")

    def predicate(data: bytes) -> bool:
        table = parse_table(data)
        return table is not None and table.shape[1] == width

    return EvalFunction(f"schema:csv:f64x{width}", predicate, f"CSV rows of {width} finite float64 values")


def _mean_in_range(params: str) -> EvalFunction:
    column, low, high = params.split(":")
    if not column.startswith("col"):
        raise ValueError("column must be written col<I>")
    index = int(column[len("col"):])
    low_f, high_f = float(low), float(high)
    if index < 0 or low_f > high_f:
        raise ValueError("bad column index or empty range")

    def predicate(data: bytes) -> bool:
        table = parse_table(data)
        if table is None or table.shape[1] <= index:
            return False
        mean = float(np.mean(table[:, index]))
        return low_f <= mean <= high_f

    return EvalFunction(
        f"mean-in-range:{params}", predicate, f"mean of column {index} within [{low_f}, {high_f}]"
    )


_REGISTRY: dict[str, Callable[[str], EvalFunction]] = {
    "min-records": _min_records,
    "schema": _schema,
    "mean-in-range": _mean_in_range,
}


def register_eval(kind: str, factory: Callable[[str], EvalFunction]):
    """Make ``<kind>:<params>`` ids resolvable; ``factory`` receives the params string."""
    if ":" in kind:
        raise ValueError("eval kinds cannot contain ':'")
    _REGISTRY[kind] = factory


def builtin_eval(eval_id: str) -> EvalFunction:
    kind, sep, params = eval_id.partition(":")
    factory = _REGISTRY.get(kind)
    if factory is None or not sep:
        raise UnknownEval(f"unknown evaluation function {eval_id!r}")
    try:
        function = factory(params)
    except (ValueError, TypeError) as exc:
        raise UnknownEval(f"bad parameters for {eval_id!r}: {exc}") from exc
    # Keep the caller's spelling so statement binding is exact.
    return EvalFunction(eval_id, function.predicate, function.description)
