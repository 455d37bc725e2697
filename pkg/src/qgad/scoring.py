"""Window-based detection scoring.

A labeled window counts as one true positive when at least one flag
falls inside it (extra flags in the same window are collapsed onto the
earliest), as one false negative otherwise; every flag outside all
windows is its own false positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ScoreReport:
    """Window-reduced detection counts.

    num_positives counts the reduced detections (one per hit window plus
    each outside flag), so true_positives + false_positives ==
    num_positives and true_positives + false_negatives == num_anomalies.
    """

    num_anomalies: int
    num_positives: int
    true_positives: int
    false_positives: int
    false_negatives: int


def flags_from_records(records, length: int) -> np.ndarray:
    """Boolean flag array over the full series range from detection records."""
    flags = np.zeros(length, dtype=bool)
    for rec in records:
        if not 0 <= rec.t < length:
            raise ValueError(f"record index {rec.t} outside series of length {length}")
        if rec.pruned_flag:
            flags[rec.t] = True
    return flags


def score_nab_windows(flags, windows) -> ScoreReport:
    """Score a boolean flag array against inclusive, non-overlapping index windows."""
    flags = np.asarray(flags, dtype=bool)
    windows = list(windows)
    flag_idx = np.flatnonzero(flags)
    claimed = np.zeros(flag_idx.size, dtype=bool)
    tp = 0
    fn = 0
    for start, end in windows:
        if end < start:
            raise ValueError(f"window ({start}, {end}) has end before start")
        inside = (flag_idx >= start) & (flag_idx <= end)
        if inside.any():
            tp += 1
        else:
            fn += 1
        claimed |= inside
    fp = int(np.sum(~claimed))
    return ScoreReport(
        num_anomalies=len(windows),
        num_positives=tp + fp,
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
    )
