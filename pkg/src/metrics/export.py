"""CSV and JSON writers for error reports and result tables.

Numbers are written with 17 significant digits so doubles round-trip;
non-finite values become empty CSV cells and JSON nulls.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from config import CSV_SIGNIFICANT_DIGITS
from metrics.dynamic_error import ErrorReport


def format_float(value: float) -> str:
    v = float(value)
    if not math.isfinite(v):
        return ""
    return f"{v:.{CSV_SIGNIFICANT_DIGITS}g}"


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(to_jsonable(payload), indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_errors_csv(report: ErrorReport, path: Path) -> Path:
    """errors.csv: t, eps1_q1.., eps2_q1.."""
    n_q = report.eps1.shape[1]
    header = ["t"] + [f"eps1_q{i + 1}" for i in range(n_q)] + [f"eps2_q{i + 1}" for i in range(n_q)]
    rows = (
        [t, *e1, *e2]
        for t, e1, e2 in zip(report.sample_times, report.eps1, report.eps2)
    )
    return write_csv(path, header, rows)


def error_summary(report: ErrorReport) -> dict:
    return {
        "E1": report.summary(1),
        "E2": report.summary(2),
        "units": list(report.units),
        "samples_per_interval": report.samples_per_interval,
    }
