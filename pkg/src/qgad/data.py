"""Series ingestion, normalization, and synthetic benchmark generators.

On disk a series is a two-column CSV with header ``timestamp,value``.
Label windows live in an optional sidecar ``<stem>.labels.json`` next to
the CSV: ``{"windows": [[start, end], ...]}`` with inclusive 0-based
indices, plus an optional ``"bounds": [lo, hi]`` entry.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class DataError(Exception):
    """Raised for malformed or unusable input data."""


def merge_windows(windows) -> list[tuple[int, int]]:
    """Sort and merge overlapping or touching inclusive index windows."""
    cleaned: list[tuple[int, int]] = []
    for win in windows:
        start, end = int(win[0]), int(win[1])
        if end < start:
            raise DataError(f"window ({start}, {end}) has end before start")
        cleaned.append((start, end))
    cleaned.sort()
    merged: list[tuple[int, int]] = []
    for start, end in cleaned:
        if merged and start <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], end))
        else:
            merged.append((start, end))
    return merged


@dataclass
class LabeledSeries:
    """A raw series with normalization bounds and (possibly empty) label windows."""

    timestamps: list[str]
    values: np.ndarray
    bounds: tuple[float, float]
    anomaly_windows: list[tuple[int, int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size == 0:
            raise DataError("series must hold at least one value")
        if len(self.timestamps) != vals.size:
            raise DataError("timestamps and values must have equal length")
        lo, hi = float(self.bounds[0]), float(self.bounds[1])
        if not hi > lo:
            raise DataError(f"degenerate bounds ({lo}, {hi})")
        merged = merge_windows(self.anomaly_windows)
        for start, end in merged:
            if start < 0 or end >= vals.size:
                raise DataError(f"window ({start}, {end}) outside the series")
        self.values = vals
        self.bounds = (lo, hi)
        self.anomaly_windows = merged


def sidecar_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".labels.json")


def load_series_csv(path, bounds: tuple[float, float] | None = None) -> LabeledSeries:
    """Read a ``timestamp,value`` CSV plus its label sidecar, if present.

    Bounds priority: explicit argument, sidecar "bounds", then the data's
    own min/max (with a warning, since that leaks the future into the
    normalization).
    """
    p = Path(path)
    if not p.is_file():
        raise DataError(f"no such file: {p}")
    timestamps: list[str] = []
    values: list[float] = []
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{p}: empty file") from None
        if [c.strip().lower() for c in header] != ["timestamp", "value"]:
            raise DataError(f"{p}: header must be 'timestamp,value', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataError(f"{p}: row {lineno}: expected 2 fields, got {len(row)}")
            try:
                values.append(float(row[1]))
            except ValueError:
                raise DataError(f"{p}: row {lineno}: non-numeric value {row[1]!r}") from None
            timestamps.append(row[0])
    if not values:
        raise DataError(f"{p}: no data rows")

    windows: list[tuple[int, int]] = []
    sidecar = sidecar_path(p)
    sidecar_bounds: tuple[float, float] | None = None
    if sidecar.is_file():
        try:
            raw = json.loads(sidecar.read_text())
        except json.JSONDecodeError as exc:
            raise DataError(f"{sidecar}: invalid JSON: {exc}") from None
        windows = [(int(w[0]), int(w[1])) for w in raw.get("windows", [])]
        if "bounds" in raw:
            sidecar_bounds = (float(raw["bounds"][0]), float(raw["bounds"][1]))

    if bounds is None:
        bounds = sidecar_bounds
    if bounds is None:
        bounds = (min(values), max(values))
        warnings.warn(
            f"{p}: no normalization bounds given; falling back to data min/max {bounds}",
            stacklevel=2,
        )
    return LabeledSeries(timestamps, np.array(values), bounds, windows)


def save_series_csv(series: LabeledSeries, path) -> Path:
    """Write the CSV and, when windows exist, the label sidecar."""
    p = Path(path)
    lines = ["timestamp,value"]
    lines += [f"{ts},{repr(float(v))}" for ts, v in zip(series.timestamps, series.values)]
    p.write_text("\n".join(lines) + "\n")
    if series.anomaly_windows:
        payload = {
            "windows": [[int(s), int(e)] for s, e in series.anomaly_windows],
            "bounds": [series.bounds[0], series.bounds[1]],
        }
        sidecar_path(p).write_text(json.dumps(payload, indent=1) + "\n")
    return p


def normalize(values, bounds: tuple[float, float]) -> np.ndarray:
    """Map values into [0, 1] by (v - lo) / (hi - lo); out-of-range values clamp with a warning."""
    lo, hi = float(bounds[0]), float(bounds[1])
    if not hi > lo:
        raise DataError(f"degenerate bounds ({lo}, {hi})")
    arr = np.asarray(values, dtype=np.float64)
    outside = int(np.sum((arr < lo) | (arr > hi)))
    if outside:
        warnings.warn(f"{outside} value(s) outside bounds ({lo}, {hi}); clamped", stacklevel=2)
    return (np.clip(arr, lo, hi) - lo) / (hi - lo)


KIND_LEVEL_SHIFT = "level_shift"
KIND_SPIKE_TRAIN = "spike_train"
KIND_NOISY_SINE = "noisy_sine"

SYNTH_KINDS = (KIND_LEVEL_SHIFT, KIND_SPIKE_TRAIN, KIND_NOISY_SINE)

DEFAULT_WINDOW_HALF_WIDTH = 25


def synth_series(
    kind: str,
    *,
    length: int,
    seed: int,
    anomaly_times=(600,),
    noise_sigma: float = 0.01,
    base_level: float = 0.3,
    shift_level: float = 0.7,
    spike_height: float = 0.4,
    period: float = 8.0,
    amplitude: float = 0.15,
    window_half_width: int = DEFAULT_WINDOW_HALF_WIDTH,
) -> LabeledSeries:
    """Deterministic synthetic series with labeled anomaly windows.

    Kinds: ``level_shift`` (the level toggles between base and shift at
    each anomaly time), ``spike_train`` (one-step additive spikes on a
    flat base), ``noisy_sine`` (spikes on a short-period sine). Values
    are clipped to [0, 1]; each anomaly gets an inclusive window of
    +/- window_half_width, overlapping windows merged.
    """
    if kind not in SYNTH_KINDS:
        raise DataError(f"unknown synth kind {kind!r}; expected one of {SYNTH_KINDS}")
    if length < 2:
        raise DataError("length must be >= 2")
    if window_half_width < 0:
        raise DataError("window_half_width must be >= 0")
    if noise_sigma < 0:
        raise DataError("noise_sigma must be >= 0")
    times = sorted(int(t) for t in anomaly_times)
    if any(t < 0 or t >= length for t in times):
        raise DataError("anomaly times must lie inside the series")

    if kind == KIND_LEVEL_SHIFT:
        base = np.full(length, float(base_level))
        levels = (float(base_level), float(shift_level))
        current = 0
        for t in times:
            current ^= 1
            base[t:] = levels[current]
    elif kind == KIND_SPIKE_TRAIN:
        base = np.full(length, float(base_level))
        for t in times:
            base[t] += float(spike_height)
    else:
        phase = 2.0 * np.pi * np.arange(length) / float(period)
        base = 0.5 + float(amplitude) * np.sin(phase)
        for t in times:
            base[t] += float(spike_height)

    rng = np.random.default_rng(seed)
    values = np.clip(base + rng.normal(0.0, noise_sigma, size=length), 0.0, 1.0)
    windows = [
        (max(0, t - window_half_width), min(length - 1, t + window_half_width)) for t in times
    ]
    timestamps = [str(i) for i in range(length)]
    return LabeledSeries(timestamps, values, (0.0, 1.0), windows)
