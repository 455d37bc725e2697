"""Continual-learning anomaly detection over a normalized series.

Every step scores the incoming value with the discriminator-vs-data loss
(or the |value - prediction| distance), compares it against a static or
noise-adaptive threshold, and then trains the model for a number of
passes proportional to the loss. The adaptive threshold looks at a
quantile of recent local loss variations, so a noisy stream raises the
bar instead of flooding the output with flags.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gan import QganModel, generate_point, loss_dx, train

THRESHOLD_DYNAMIC = "dynamic"
THRESHOLD_STATIC = "static"

SCORE_LOSS = "loss"
SCORE_DISTANCE = "distance"


@dataclass(frozen=True)
class DetectorConfig:
    """Stream-processing knobs; defaults follow the reference setup."""

    window: int = 10
    epsilon: float = 0.05
    step_multiplier: float = 10.0
    threshold_base: float = 0.3
    threshold_gain: float = 2.0
    quantile_p: float = 0.95
    noise_window: int = 500
    variation_radius: int = 2
    prune_steps: int = 30
    threshold_mode: str = THRESHOLD_DYNAMIC
    static_threshold: float = 0.3
    score_mode: str = SCORE_LOSS

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.step_multiplier < 0:
            raise ValueError("step_multiplier must be >= 0")
        if self.threshold_base < 0 or self.threshold_gain < 0:
            raise ValueError("threshold base/gain must be >= 0")
        if not 0.0 < self.quantile_p < 1.0:
            raise ValueError("quantile_p must be in (0, 1)")
        if self.variation_radius < 1:
            raise ValueError("variation_radius must be >= 1")
        if self.noise_window <= 2 * self.variation_radius:
            raise ValueError("noise_window must exceed 2 * variation_radius")
        if self.prune_steps < 0:
            raise ValueError("prune_steps must be >= 0")
        if self.threshold_mode not in (THRESHOLD_DYNAMIC, THRESHOLD_STATIC):
            raise ValueError(f"unknown threshold_mode {self.threshold_mode!r}")
        if self.score_mode not in (SCORE_LOSS, SCORE_DISTANCE):
            raise ValueError(f"unknown score_mode {self.score_mode!r}")


@dataclass
class DetectionRecord:
    """Per-step outcome; `t` indexes the original series."""

    t: int
    value: float
    generated: float
    loss: float
    threshold: float
    raw_flag: bool
    pruned_flag: bool


def local_variation(losses, t: int, delta: int) -> float:
    """Largest |L_t - L_i| over the index window |i - t| <= delta, clipped to bounds."""
    arr = np.asarray(losses, dtype=np.float64)
    if not 0 <= t < arr.size:
        raise ValueError("t outside the loss series")
    if delta < 1:
        raise ValueError("delta must be >= 1")
    seg = arr[max(0, t - delta) : t + delta + 1]
    return float(np.max(np.abs(arr[t] - seg)))


def _quantile_linear(values: np.ndarray, p: float) -> float:
    """p-quantile with linear interpolation between order statistics."""
    ordered = np.sort(values)
    pos = p * (ordered.size - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, ordered.size - 1)
    return float(ordered[lo] + (ordered[hi] - ordered[lo]) * (pos - lo))


def noise_estimate(losses, t: int, config: DetectorConfig) -> float:
    """Quantile of local variations over the trailing noise window.

    Looks at Var(s, delta) for t - noise_window < s < t. Returns 0 while
    fewer than 2*delta + 1 losses precede t, so the threshold falls back
    to its base value early in the stream.
    """
    delta = config.variation_radius
    if t < 2 * delta + 1:
        return 0.0
    arr = np.asarray(losses, dtype=np.float64)
    start = max(0, t - config.noise_window + 1)
    if start > t - 1:
        return 0.0
    variations = np.array(
        [local_variation(arr, s, delta) for s in range(start, t)], dtype=np.float64
    )
    return _quantile_linear(variations, config.quantile_p)


def dynamic_threshold(noise: float, config: DetectorConfig) -> float:
    """threshold = gain * noise + base."""
    return config.threshold_gain * noise + config.threshold_base


def gradient_step_policy(loss: float, config: DetectorConfig) -> int:
    """Training passes for this step: 0 below epsilon, else floor(multiplier * loss)."""
    if loss < config.epsilon:
        return 0
    return int(math.floor(config.step_multiplier * loss))


def detect_stream(series, model: QganModel, config: DetectorConfig) -> list[DetectionRecord]:
    """Run the detector over a normalized series; returns one record per scored step.

    Decisions start at index `window`. With the dynamic threshold, the
    flag decision for step t is finalized `variation_radius` steps later
    so the variation window around each recent loss is complete; the
    trailing steps are finalized against the available prefix when the
    stream ends. Flags are suppressed for `prune_steps` steps after the
    stream start and after every emitted flag. Training always runs,
    flagged or not.
    """
    values = np.asarray(series, dtype=np.float64)
    w = config.window
    if values.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if values.size <= w:
        raise ValueError(f"series length must exceed the window {w}")
    if np.any(values < 0.0) or np.any(values > 1.0):
        raise ValueError("series values must be normalized to [0, 1]")
    if model.config.window != w or model.config.circuit.layers != w:
        raise ValueError("detector window must match the model's context window")

    dynamic = config.threshold_mode == THRESHOLD_DYNAMIC
    records: list[DetectionRecord] = []
    losses: list[float] = []
    scores: list[float] = []
    suppress_until = w + config.prune_steps

    def finalize(pos: int) -> None:
        nonlocal suppress_until
        i = pos - w
        if dynamic:
            eta = dynamic_threshold(noise_estimate(losses, i, config), config)
        else:
            eta = config.static_threshold
        raw = scores[i] > eta
        pruned = raw and pos >= suppress_until
        if pruned:
            suppress_until = pos + 1 + config.prune_steps
        rec = records[i]
        rec.threshold = eta
        rec.raw_flag = raw
        rec.pruned_flag = pruned

    for t in range(w, values.size):
        context = values[t - w : t][::-1].copy()  # most recent value first
        predicted = generate_point(model, context)
        target = float(values[t])
        loss = loss_dx(model, context, target)
        score = loss if config.score_mode == SCORE_LOSS else abs(target - predicted)
        records.append(
            DetectionRecord(
                t=t,
                value=target,
                generated=predicted,
                loss=loss,
                threshold=math.nan,
                raw_flag=False,
                pruned_flag=False,
            )
        )
        losses.append(loss)
        scores.append(score)
        if dynamic:
            ready = t - config.variation_radius
            if ready >= w:
                finalize(ready)
        else:
            finalize(t)
        for _ in range(gradient_step_policy(loss, config)):
            train(model, [(context, target)], epochs=1, counts=(1, 1, 1))
    if dynamic:
        for pos in range(max(w, values.size - config.variation_radius), values.size):
            finalize(pos)
    return records
