"""Detection report emission and re-ingestion.

The CSV layout is fixed: header ``t,value,generated,loss,threshold,
raw_flag,pruned_flag``, one row per scored step, floats in shortest
round-trip form, flags as 0/1. Emission is byte-stable for identical
inputs. The JSON form mirrors the record fields and carries the score
block when present.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict
from pathlib import Path

from .data import DataError
from .detector import DetectionRecord
from .scoring import ScoreReport

CSV_COLUMNS = ("t", "value", "generated", "loss", "threshold", "raw_flag", "pruned_flag")

FORMAT_CSV = "csv"
FORMAT_JSON = "json"


def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_report_csv(records, path) -> Path:
    records = list(records)
    if not records:
        raise DataError("refusing to emit an empty report")
    lines = [",".join(CSV_COLUMNS)]
    for rec in records:
        lines.append(
            ",".join(
                (
                    str(int(rec.t)),
                    _fmt_float(rec.value),
                    _fmt_float(rec.generated),
                    _fmt_float(rec.loss),
                    _fmt_float(rec.threshold),
                    str(int(rec.raw_flag)),
                    str(int(rec.pruned_flag)),
                )
            )
        )
    out = Path(path)
    out.write_text("\n".join(lines) + "\n")
    return out


def write_report_json(records, score: ScoreReport | None, path) -> Path:
    records = list(records)
    if not records:
        raise DataError("refusing to emit an empty report")
    payload = {
        "records": [
            {
                "t": int(rec.t),
                "value": float(rec.value),
                "generated": float(rec.generated),
                "loss": float(rec.loss),
                "threshold": float(rec.threshold),
                "raw_flag": bool(rec.raw_flag),
                "pruned_flag": bool(rec.pruned_flag),
            }
            for rec in records
        ],
        "score": asdict(score) if score is not None else None,
    }
    out = Path(path)
    out.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")
    return out


def emit_report(records, score: ScoreReport | None, fmt: str, path) -> Path:
    """Write records (and optional score) as CSV or JSON."""
    if fmt == FORMAT_CSV:
        return write_report_csv(records, path)
    if fmt == FORMAT_JSON:
        return write_report_json(records, score, path)
    raise ValueError(f"unknown report format {fmt!r}")


def read_report_csv(path) -> list[DetectionRecord]:
    """Parse a CSV written by write_report_csv back into records."""
    p = Path(path)
    if not p.is_file():
        raise DataError(f"no such file: {p}")
    lines = p.read_text().splitlines()
    if not lines or lines[0] != ",".join(CSV_COLUMNS):
        raise DataError(f"{p}: missing or wrong report header")
    records: list[DetectionRecord] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(CSV_COLUMNS):
            raise DataError(f"{p}: row {lineno}: expected {len(CSV_COLUMNS)} fields")
        try:
            records.append(
                DetectionRecord(
                    t=int(parts[0]),
                    value=float(parts[1]),
                    generated=float(parts[2]),
                    loss=float(parts[3]),
                    threshold=float(parts[4]),
                    raw_flag=bool(int(parts[5])),
                    pruned_flag=bool(int(parts[6])),
                )
            )
        except ValueError as exc:
            raise DataError(f"{p}: row {lineno}: {exc}") from None
    if not records:
        raise DataError(f"{p}: no data rows")
    return records


def round_trip_equal(a: DetectionRecord, b: DetectionRecord, tol: float = 1e-12) -> bool:
    """Field comparison used by tests: exact ints/flags, tol on reals (NaN == NaN)."""

    def close(x: float, y: float) -> bool:
        if math.isnan(x) and math.isnan(y):
            return True
        return abs(x - y) <= tol

    return (
        a.t == b.t
        and a.raw_flag == b.raw_flag
        and a.pruned_flag == b.pruned_flag
        and close(a.value, b.value)
        and close(a.generated, b.generated)
        and close(a.loss, b.loss)
        and close(a.threshold, b.threshold)
    )
