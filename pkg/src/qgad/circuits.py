"""Parameterized agent circuits built from interleaved injection and
variational layers.

An agent loads a context window of K values into n qubits by alternating
input layers (one RY per qubit whose angle is the context value times a
trainable weight) with variational layers (trainable RX and RZ on every
qubit, then a CNOT staircase), and finishes with a configurable number of
trailing variational blocks. The window length K is independent of n.

The discriminator and the generator share this architecture but own
disjoint halves of one flat parameter vector: discriminator block first,
generator block second, each of size `param_count(config)`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .sim import Gate, GateKind, StateVector, apply_circuit, new_zero_state


class Partition(enum.Enum):
    DISCRIMINATOR = "discriminator"
    GENERATOR = "generator"


@dataclass(frozen=True)
class CircuitConfig:
    """Shape of one agent circuit: qubit count, injection layers, trailing blocks."""

    agent_qubits: int
    layers: int
    final_blocks: int = 1

    def __post_init__(self) -> None:
        if self.agent_qubits < 2:
            raise ValueError("agent_qubits must be >= 2")
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if self.final_blocks < 0:
            raise ValueError("final_blocks must be >= 0")


def param_count(config: CircuitConfig) -> int:
    """Trainable parameters per agent: K*n injection weights + (K+final_blocks)*2n angles."""
    n = config.agent_qubits
    return config.layers * n + (config.layers + config.final_blocks) * 2 * n


def agent_offset(config: CircuitConfig, partition: Partition) -> int:
    return 0 if partition is Partition.DISCRIMINATOR else param_count(config)


def input_param_index(config: CircuitConfig, partition: Partition, layer: int, qubit: int) -> int:
    """Flat index of the injection weight for (layer, qubit)."""
    n = config.agent_qubits
    if not 0 <= layer < config.layers:
        raise ValueError("layer index out of range")
    if not 0 <= qubit < n:
        raise ValueError("qubit index out of range")
    return agent_offset(config, partition) + layer * 3 * n + qubit


def rotation_param_index(
    config: CircuitConfig, partition: Partition, block: int, qubit: int, axis: int
) -> int:
    """Flat index of a variational angle.

    `block` counts all variational blocks 0..layers+final_blocks-1 in
    circuit order; `axis` is 0 for RX, 1 for RZ.
    """
    n = config.agent_qubits
    if not 0 <= block < config.layers + config.final_blocks:
        raise ValueError("block index out of range")
    if not 0 <= qubit < n:
        raise ValueError("qubit index out of range")
    if axis not in (0, 1):
        raise ValueError("axis must be 0 (RX) or 1 (RZ)")
    if block < config.layers:
        base = block * 3 * n + n
    else:
        base = config.layers * 3 * n + (block - config.layers) * 2 * n
    return agent_offset(config, partition) + base + 2 * qubit + axis


@dataclass
class ParamVector:
    """Flat trainable parameters for both agents plus their index layout.

    Layout: [discriminator block | generator block], each block of size
    param_count(config), indexed by the *_param_index helpers.
    """

    config: CircuitConfig
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (2 * param_count(self.config),):
            raise ValueError("values length must be 2 * param_count(config)")
        self.values = vals

    @classmethod
    def initialize(cls, config: CircuitConfig, seed: int) -> "ParamVector":
        rng = np.random.default_rng(seed)
        vals = rng.uniform(-math.pi, math.pi, size=2 * param_count(config))
        return cls(config, vals)

    def partition_slice(self, partition: Partition) -> slice:
        size = param_count(self.config)
        start = agent_offset(self.config, partition)
        return slice(start, start + size)

    def copy(self) -> "ParamVector":
        return ParamVector(self.config, self.values.copy())


@dataclass(frozen=True)
class GateBinding:
    """A gate whose angle may be bound to one parameter, with optional data scale."""

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    param_index: int | None = None
    scale: float = 1.0
    angle: float | None = None

    def resolved_angle(self, values: np.ndarray) -> float | None:
        if self.param_index is not None:
            return self.scale * float(values[self.param_index])
        return self.angle

    def bind(self, values: np.ndarray) -> Gate:
        return Gate(self.kind, self.targets, self.controls, self.resolved_angle(values))

    def shifted(self, offset: int) -> "GateBinding":
        return GateBinding(
            self.kind,
            tuple(q + offset for q in self.targets),
            tuple(q + offset for q in self.controls),
            self.param_index,
            self.scale,
            self.angle,
        )


@dataclass(frozen=True)
class CircuitSpec:
    """An ordered gate sequence with parameter bindings."""

    gates: tuple[GateBinding, ...]

    def __add__(self, other: "CircuitSpec") -> "CircuitSpec":
        return CircuitSpec(self.gates + other.gates)

    def shifted(self, offset: int) -> "CircuitSpec":
        return CircuitSpec(tuple(g.shifted(offset) for g in self.gates))

    def bind(self, values: np.ndarray) -> list[Gate]:
        return [g.bind(values) for g in self.gates]

    def param_indices(self) -> list[int]:
        return [g.param_index for g in self.gates if g.param_index is not None]


def input_layer(
    config: CircuitConfig,
    layer: int,
    value: float,
    params: ParamVector,
    partition: Partition = Partition.DISCRIMINATOR,
) -> CircuitSpec:
    """Injection layer: RY(value * weight) on every agent qubit."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"context value {value!r} outside [0, 1]")
    gates = tuple(
        GateBinding(
            GateKind.RY,
            (q,),
            param_index=input_param_index(config, partition, layer, q),
            scale=float(value),
        )
        for q in range(config.agent_qubits)
    )
    _check_indices(gates, params)
    return CircuitSpec(gates)


def variational_layer(
    config: CircuitConfig,
    block: int,
    params: ParamVector,
    partition: Partition = Partition.DISCRIMINATOR,
) -> CircuitSpec:
    """Variational block: RX then RZ on each qubit, then the CNOT staircase."""
    n = config.agent_qubits
    gates: list[GateBinding] = []
    for q in range(n):
        for axis, kind in enumerate((GateKind.RX, GateKind.RZ)):
            gates.append(
                GateBinding(
                    kind,
                    (q,),
                    param_index=rotation_param_index(config, partition, block, q, axis),
                )
            )
    for q in range(n - 1):
        gates.append(GateBinding(GateKind.CNOT, (q + 1,), (q,)))
    spec = tuple(gates)
    _check_indices(spec, params)
    return CircuitSpec(spec)


def build_agent_circuit(
    config: CircuitConfig,
    context,
    params: ParamVector,
    partition: Partition,
) -> CircuitSpec:
    """Full agent circuit for one context window (length == config.layers)."""
    context = np.asarray(context, dtype=np.float64)
    if context.shape != (config.layers,):
        raise ValueError(
            f"context length {context.size} does not match layers {config.layers}"
        )
    spec = CircuitSpec(())
    for k in range(config.layers):
        spec = spec + input_layer(config, k, float(context[k]), params, partition)
        spec = spec + variational_layer(config, k, params, partition)
    for j in range(config.final_blocks):
        spec = spec + variational_layer(config, config.layers + j, params, partition)
    return spec


def encode_target(value: float) -> CircuitSpec:
    """Target encoding RY(value) on a single qubit (local index 0)."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"target value {value!r} outside [0, 1]")
    return CircuitSpec((GateBinding(GateKind.RY, (0,), angle=float(value)),))


def run_spec(spec: CircuitSpec, values: np.ndarray, num_qubits: int) -> StateVector:
    """Bind and apply a circuit spec to |0...0>."""
    return apply_circuit(new_zero_state(num_qubits), spec.bind(values))


def _check_indices(gates, params: ParamVector) -> None:
    limit = params.values.size
    for g in gates:
        if g.param_index is not None and not 0 <= g.param_index < limit:
            raise ValueError("parameter index outside the parameter vector")
