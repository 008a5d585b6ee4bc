from .correlation import argmax_primary, best_primary_xi, classify_correlation, pearson
from .error import mean_relative_error
from .load import classify_load
from .reporting import (
    REPORT_COLUMNS,
    build_epoch_frame,
    build_rows,
    evaluate_epoch,
    summarize,
    write_report_csv,
)
from .sweep import normalized_best_throughput, sweep

__all__ = [
    "REPORT_COLUMNS",
    "argmax_primary",
    "best_primary_xi",
    "build_epoch_frame",
    "build_rows",
    "classify_correlation",
    "classify_load",
    "evaluate_epoch",
    "mean_relative_error",
    "normalized_best_throughput",
    "pearson",
    "summarize",
    "sweep",
    "write_report_csv",
]
