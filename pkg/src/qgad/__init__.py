"""Quantum-GAN time-series prediction and continual-learning anomaly detection.

A dense statevector simulator drives two small parameterized circuits
(discriminator and generator) trained adversarially with swap-test
fidelity losses; a streaming detector scores each incoming point, adapts
its threshold to recent loss noise, and keeps training as the stream
moves.
"""

from .circuits import (
    CircuitConfig,
    CircuitSpec,
    ParamVector,
    Partition,
    build_agent_circuit,
    encode_target,
    input_layer,
    param_count,
    variational_layer,
)
from .data import DataError, LabeledSeries, load_series_csv, normalize, save_series_csv, synth_series
from .detector import (
    DetectionRecord,
    DetectorConfig,
    detect_stream,
    dynamic_threshold,
    gradient_step_policy,
    local_variation,
    noise_estimate,
)
from .gan import (
    LossKind,
    QganConfig,
    QganModel,
    TrainHistory,
    fidelity_dg,
    fidelity_dx,
    generate_point,
    gradient,
    load_checkpoint,
    loss_dg,
    loss_dx,
    loss_gd,
    save_checkpoint,
    train,
)
from .report import emit_report, read_report_csv
from .scoring import ScoreReport, flags_from_records, score_nab_windows
from .sim import (
    DensityMatrix,
    Gate,
    GateKind,
    StateVector,
    apply_gate,
    measure_prob,
    new_zero_state,
    purity_overlap,
    reduced_density,
    sample_measurements,
    swap_test,
)

__version__ = "0.1.0"

__all__ = [
    "CircuitConfig",
    "CircuitSpec",
    "DataError",
    "DensityMatrix",
    "DetectionRecord",
    "DetectorConfig",
    "Gate",
    "GateKind",
    "LabeledSeries",
    "LossKind",
    "ParamVector",
    "Partition",
    "QganConfig",
    "QganModel",
    "ScoreReport",
    "StateVector",
    "TrainHistory",
    "apply_gate",
    "build_agent_circuit",
    "detect_stream",
    "dynamic_threshold",
    "emit_report",
    "encode_target",
    "fidelity_dg",
    "fidelity_dx",
    "flags_from_records",
    "generate_point",
    "gradient",
    "gradient_step_policy",
    "input_layer",
    "load_checkpoint",
    "load_series_csv",
    "local_variation",
    "loss_dg",
    "loss_dx",
    "loss_gd",
    "measure_prob",
    "new_zero_state",
    "noise_estimate",
    "normalize",
    "param_count",
    "purity_overlap",
    "read_report_csv",
    "reduced_density",
    "sample_measurements",
    "save_checkpoint",
    "save_series_csv",
    "score_nab_windows",
    "swap_test",
    "synth_series",
    "train",
    "variational_layer",
]
