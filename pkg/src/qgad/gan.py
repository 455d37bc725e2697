"""Adversarial training of two agent circuits with swap-test fidelity losses.

The discriminator learns the distribution of (context, next value) pairs;
the generator learns to mimic the discriminator. Fidelities are measured
by a swap test between single qubits:

* fidelity_dx — discriminator output qubit vs the RY-encoded data qubit,
* fidelity_dg — discriminator output qubit vs generator output qubit,

with F = 2 * P(ancilla=0) - 1, clamped away from {0, 1} so the log losses
stay finite. Gradients use the parameter-shift rule on the fidelity
(gate angle +/- pi/2; data-scaled gates multiply by the context value)
chain-ruled through the loss.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _batch
from .circuits import (
    CircuitConfig,
    CircuitSpec,
    GateBinding,
    ParamVector,
    Partition,
    build_agent_circuit,
    encode_target,
)
from .sim import GateKind, ROTATION_KINDS

CHECKPOINT_FORMAT = "qgad.checkpoint"
CHECKPOINT_VERSION = 1


class LossKind(enum.Enum):
    DX = "dx"  # discriminator vs data, trains the discriminator
    DG = "dg"  # discriminator vs generator, trains the discriminator
    GD = "gd"  # generator vs discriminator, trains the generator


@dataclass(frozen=True)
class QganConfig:
    """Training-time knobs around one CircuitConfig."""

    circuit: CircuitConfig
    window: int = 10
    learning_rate: float = 0.005
    epochs: int = 1
    training_counts: tuple[int, int, int] = (1, 1, 1)
    fidelity_shots: int | None = None
    fidelity_seed: int = 0
    fidelity_clamp: float = 1e-9

    def __post_init__(self) -> None:
        if self.window != self.circuit.layers:
            raise ValueError("window must equal circuit.layers (one injection layer per point)")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if len(self.training_counts) != 3 or any(c < 1 for c in self.training_counts):
            raise ValueError("training_counts must be three integers >= 1")
        if self.fidelity_shots is not None and self.fidelity_shots < 1:
            raise ValueError("fidelity_shots must be >= 1 when set")
        if not 0.0 < self.fidelity_clamp < 0.5:
            raise ValueError("fidelity_clamp must be in (0, 0.5)")


@dataclass
class QganModel:
    """Parameter state plus the seeded generators that drive training."""

    config: QganConfig
    params: ParamVector
    rng: np.random.Generator
    shot_rng: np.random.Generator

    @classmethod
    def initialize(cls, config: QganConfig, seed: int) -> "QganModel":
        params = ParamVector.initialize(config.circuit, seed)
        return cls(
            config=config,
            params=params,
            rng=np.random.default_rng(seed),
            shot_rng=np.random.default_rng(config.fidelity_seed),
        )


@dataclass
class TrainHistory:
    """Per-update losses, one list per training phase, in update order."""

    dx: list[float] = field(default_factory=list)
    gd: list[float] = field(default_factory=list)
    dg: list[float] = field(default_factory=list)


def _swap_fragment(ancilla: int, qubit_a: int, qubit_b: int) -> CircuitSpec:
    return CircuitSpec(
        (
            GateBinding(GateKind.H, (ancilla,)),
            GateBinding(GateKind.CSWAP, (qubit_a, qubit_b), (ancilla,)),
            GateBinding(GateKind.H, (ancilla,)),
        )
    )


def _dx_pipeline(model: QganModel, context, target: float) -> tuple[CircuitSpec, int]:
    """Register: ancilla 0, discriminator 1..n, data qubit n+1."""
    n = model.config.circuit.agent_qubits
    disc = build_agent_circuit(
        model.config.circuit, context, model.params, Partition.DISCRIMINATOR
    ).shifted(1)
    data = encode_target(target).shifted(n + 1)
    return disc + data + _swap_fragment(0, n, n + 1), n + 2


def _dg_pipeline(model: QganModel, context) -> tuple[CircuitSpec, int]:
    """Register: ancilla 0, discriminator 1..n, generator n+1..2n."""
    n = model.config.circuit.agent_qubits
    disc = build_agent_circuit(
        model.config.circuit, context, model.params, Partition.DISCRIMINATOR
    ).shifted(1)
    gen = build_agent_circuit(
        model.config.circuit, context, model.params, Partition.GENERATOR
    ).shifted(n + 1)
    return disc + gen + _swap_fragment(0, n, 2 * n), 2 * n + 1


def _clamp(value: float, eps: float) -> float:
    return min(max(value, eps), 1.0 - eps)


def _fidelities(model: QganModel, spec: CircuitSpec, num_qubits: int, angle_rows: np.ndarray) -> np.ndarray:
    """Raw (unclamped) swap-test fidelities for each angle row."""
    compiled = _batch.compile_spec(spec, num_qubits)
    amps = _batch.run(compiled, angle_rows)
    p0 = _batch.marginal_prob(amps, 0, 0)
    if model.config.fidelity_shots is not None:
        shots = model.config.fidelity_shots
        counts = model.shot_rng.binomial(shots, np.clip(p0, 0.0, 1.0))
        p0 = counts / shots
    return 2.0 * p0 - 1.0


def _single_fidelity(model: QganModel, spec: CircuitSpec, num_qubits: int) -> float:
    rows = _batch.base_angles(spec, model.params.values)[None, :]
    raw = _fidelities(model, spec, num_qubits, rows)[0]
    return _clamp(float(raw), model.config.fidelity_clamp)


def fidelity_dx(model: QganModel, context, target: float) -> float:
    """Clamped swap-test fidelity between discriminator output and encoded target."""
    spec, nq = _dx_pipeline(model, context, target)
    return _single_fidelity(model, spec, nq)


def fidelity_dg(model: QganModel, context) -> float:
    """Clamped swap-test fidelity between discriminator and generator outputs."""
    spec, nq = _dg_pipeline(model, context)
    return _single_fidelity(model, spec, nq)


def loss_dx(model: QganModel, context, target: float) -> float:
    """-log F(D, data): low when the discriminator accepts the observed pair."""
    return -math.log(fidelity_dx(model, context, target))


def loss_dg(model: QganModel, context) -> float:
    """-log(1 - F(D, G)): the discriminator's loss against the generator."""
    return -math.log(1.0 - fidelity_dg(model, context))


def loss_gd(model: QganModel, context) -> float:
    """-log F(D, G): the generator's loss for failing to mimic the discriminator."""
    return -math.log(fidelity_dg(model, context))


_TRAINED_PARTITION = {
    LossKind.DX: Partition.DISCRIMINATOR,
    LossKind.DG: Partition.DISCRIMINATOR,
    LossKind.GD: Partition.GENERATOR,
}


def _loss_from_fidelity(kind: LossKind, fid: float) -> float:
    if kind is LossKind.DG:
        return -math.log(1.0 - fid)
    return -math.log(fid)


def _gradient_masked(
    model: QganModel, kind: LossKind, partition: Partition, context, target: float | None
) -> tuple[np.ndarray, float]:
    """Gradient of the `kind` loss restricted to `partition`, plus the base loss."""
    if kind is LossKind.DX:
        if target is None:
            raise ValueError("loss kind dx needs a target value")
        spec, nq = _dx_pipeline(model, context, target)
    else:
        spec, nq = _dg_pipeline(model, context)
    trained = model.params.partition_slice(partition)

    # Locate the rotation gates bound to trained parameters; each trained
    # parameter appears in exactly one gate.
    shift_targets: list[tuple[int, int, float]] = []
    ordinal = -1
    for g in spec.gates:
        if g.kind in ROTATION_KINDS:
            ordinal += 1
            if g.param_index is not None and trained.start <= g.param_index < trained.stop:
                shift_targets.append((ordinal, g.param_index, g.scale))

    base = _batch.base_angles(spec, model.params.values)
    rows = np.tile(base, (1 + 2 * len(shift_targets), 1))
    for m, (rot, _, _) in enumerate(shift_targets):
        rows[1 + 2 * m, rot] += 0.5 * math.pi
        rows[2 + 2 * m, rot] -= 0.5 * math.pi

    fids = _fidelities(model, spec, nq, rows)
    fid = _clamp(float(fids[0]), model.config.fidelity_clamp)
    loss = _loss_from_fidelity(kind, fid)

    grad = np.zeros_like(model.params.values)
    for m, (_, pidx, scale) in enumerate(shift_targets):
        dfid = 0.5 * (fids[1 + 2 * m] - fids[2 + 2 * m]) * scale
        if kind is LossKind.DG:
            grad[pidx] = dfid / (1.0 - fid)
        else:
            grad[pidx] = -dfid / fid
    return grad, loss


def gradient(model: QganModel, kind: LossKind, context, target: float | None = None) -> np.ndarray:
    """Parameter-shift gradient of the given loss over the trained partition.

    Entries of the untouched partition are zero. Length matches
    model.params.values.
    """
    grad, _ = _gradient_with_loss(model, kind, context, target)
    return grad


def train(
    model: QganModel,
    dataset,
    *,
    epochs: int | None = None,
    counts: tuple[int, int, int] | None = None,
    learning_rate: float | None = None,
) -> TrainHistory:
    """Run the three-phase adversarial loop over (context, target) pairs.

    Per epoch: discriminator on data (loss dx), generator on discriminator
    (loss gd), discriminator on generator (loss dg), each with its sample
    count and a plain SGD update of the trained partition. The model is
    updated in place; the returned history holds each pre-update loss.
    """
    pairs = list(dataset)
    if not pairs:
        raise ValueError("dataset must hold at least one (context, target) pair")
    epochs = model.config.epochs if epochs is None else epochs
    c_dx, c_dg, c_gd = model.config.training_counts if counts is None else counts
    rate = model.config.learning_rate if learning_rate is None else learning_rate
    history = TrainHistory()
    for _ in range(epochs):
        for _ in range(c_dx):
            context, target = pairs[int(model.rng.integers(len(pairs)))]
            grad, loss = _gradient_with_loss(model, LossKind.DX, context, target)
            history.dx.append(loss)
            model.params.values -= rate * grad
        for _ in range(c_dg):
            context, _ = pairs[int(model.rng.integers(len(pairs)))]
            grad, loss = _gradient_with_loss(model, LossKind.GD, context, None)
            history.gd.append(loss)
            model.params.values -= rate * grad
        for _ in range(c_gd):
            context, _ = pairs[int(model.rng.integers(len(pairs)))]
            grad, loss = _gradient_with_loss(model, LossKind.DG, context, None)
            history.dg.append(loss)
            model.params.values -= rate * grad
    return history


def generate_point(model: QganModel, context) -> float:
    """One-step prediction: invert the RY target encoding on the generator output qubit."""
    n = model.config.circuit.agent_qubits
    spec = build_agent_circuit(model.config.circuit, context, model.params, Partition.GENERATOR)
    compiled = _batch.compile_spec(spec, n)
    amps = _batch.run(compiled, _batch.base_angles(spec, model.params.values)[None, :])
    p1 = float(np.clip(_batch.marginal_prob(amps, n - 1, 1)[0], 0.0, 1.0))
    return min(1.0, max(0.0, 2.0 * math.asin(math.sqrt(p1))))


def save_checkpoint(model: QganModel, path) -> Path:
    """Write a versioned JSON checkpoint; bit-exact round trip."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "config": {
            "circuit": {
                "agent_qubits": model.config.circuit.agent_qubits,
                "layers": model.config.circuit.layers,
                "final_blocks": model.config.circuit.final_blocks,
            },
            "window": model.config.window,
            "learning_rate": model.config.learning_rate,
            "epochs": model.config.epochs,
            "training_counts": list(model.config.training_counts),
            "fidelity_shots": model.config.fidelity_shots,
            "fidelity_seed": model.config.fidelity_seed,
            "fidelity_clamp": model.config.fidelity_clamp,
        },
        "params": [float(v) for v in model.params.values],
        "rng_state": model.rng.bit_generator.state,
        "shot_rng_state": model.shot_rng.bit_generator.state,
    }
    out = Path(path)
    out.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return out


def load_checkpoint(path) -> QganModel:
    """Restore a model saved by save_checkpoint."""
    raw = json.loads(Path(path).read_text())
    if raw.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"not a {CHECKPOINT_FORMAT} file: {path}")
    if raw.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {raw.get('version')!r}")
    cfg_raw = raw["config"]
    config = QganConfig(
        circuit=CircuitConfig(**cfg_raw["circuit"]),
        window=cfg_raw["window"],
        learning_rate=cfg_raw["learning_rate"],
        epochs=cfg_raw["epochs"],
        training_counts=tuple(cfg_raw["training_counts"]),
        fidelity_shots=cfg_raw["fidelity_shots"],
        fidelity_seed=cfg_raw["fidelity_seed"],
        fidelity_clamp=cfg_raw["fidelity_clamp"],
    )
    params = ParamVector(config.circuit, np.array(raw["params"], dtype=np.float64))
    rng = np.random.default_rng()
    rng.bit_generator.state = raw["rng_state"]
    shot_rng = np.random.default_rng()
    shot_rng.bit_generator.state = raw["shot_rng_state"]
    return QganModel(config=config, params=params, rng=rng, shot_rng=shot_rng)
