"""Seller-count scaling sweep against the pairwise baseline."""

from .sweep import (
    CSV_HEADER,
    PLOT_HEADER,
    SweepResult,
    SweepRow,
    plot_path,
    run_dcdh_point,
    run_sweep,
    run_yotta_point,
)

__all__ = [
    "CSV_HEADER",
    "PLOT_HEADER",
    "SweepResult",
    "SweepRow",
    "plot_path",
    "run_dcdh_point",
    "run_sweep",
    "run_yotta_point",
]
