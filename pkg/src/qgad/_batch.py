"""Vectorized statevector evaluation over a batch of angle assignments.

The training code runs every parameter-shift variant of one circuit in a
single pass: each batch row carries its own angles for the rotation gates
while sharing the gate sequence. Semantics are pinned to the scalar ops
in `qgad.sim` by tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import CircuitSpec
from .sim import GateKind, ROTATION_KINDS, _cnot_perm, _cswap_perm

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_ROT = "rot"
_HAD = "h"
_PERM = "perm"


@dataclass(frozen=True)
class CompiledCircuit:
    """Gate sequence lowered to batch-applicable steps."""

    num_qubits: int
    steps: tuple[tuple, ...]
    num_rotations: int


def compile_spec(spec: CircuitSpec, num_qubits: int) -> CompiledCircuit:
    steps: list[tuple] = []
    rotations = 0
    for g in spec.gates:
        if any(q >= num_qubits for q in g.targets + g.controls):
            raise ValueError(f"gate acts outside register of size {num_qubits}")
        if g.kind in ROTATION_KINDS:
            steps.append((_ROT, g.kind, g.targets[0]))
            rotations += 1
        elif g.kind is GateKind.H:
            steps.append((_HAD, g.targets[0]))
        elif g.kind is GateKind.CNOT:
            steps.append((_PERM, _cnot_perm(num_qubits, g.controls[0], g.targets[0])))
        else:
            steps.append((_PERM, _cswap_perm(num_qubits, g.controls[0], *g.targets)))
    return CompiledCircuit(num_qubits, tuple(steps), rotations)


def base_angles(spec: CircuitSpec, values: np.ndarray) -> np.ndarray:
    """Resolved angles of the rotation gates, in gate order."""
    return np.array(
        [g.resolved_angle(values) for g in spec.gates if g.kind in ROTATION_KINDS],
        dtype=np.float64,
    )


def _rotate_rows(amps: np.ndarray, kind: GateKind, qubit: int, theta: np.ndarray) -> None:
    batch = amps.shape[0]
    cube = amps.reshape(batch, -1, 2, 1 << qubit)
    a0 = cube[:, :, 0, :]
    a1 = cube[:, :, 1, :]
    half = 0.5 * theta
    if kind is GateKind.RZ:
        phase = np.exp(-1j * half)[:, None, None]
        a0 *= phase
        a1 *= np.conj(phase)
        return
    c = np.cos(half)[:, None, None]
    s = np.sin(half)[:, None, None]
    lower = a0.copy()
    if kind is GateKind.RY:
        a0 *= c
        a0 -= s * a1
        a1 *= c
        a1 += s * lower
    else:  # RX
        a0 *= c
        a0 -= 1j * s * a1
        a1 *= c
        a1 -= 1j * s * lower


def _hadamard_rows(amps: np.ndarray, qubit: int) -> None:
    batch = amps.shape[0]
    cube = amps.reshape(batch, -1, 2, 1 << qubit)
    a0 = cube[:, :, 0, :]
    a1 = cube[:, :, 1, :]
    lower = a0.copy()
    a0 += a1
    a0 *= _INV_SQRT2
    a1 *= -1.0
    a1 += lower
    a1 *= _INV_SQRT2


def run(compiled: CompiledCircuit, angles: np.ndarray) -> np.ndarray:
    """Apply the circuit to |0...0> for every row of `angles` (shape B x num_rotations)."""
    angles = np.atleast_2d(np.asarray(angles, dtype=np.float64))
    if angles.shape[1] != compiled.num_rotations:
        raise ValueError("angle row width must equal the circuit's rotation count")
    batch = angles.shape[0]
    amps = np.zeros((batch, 1 << compiled.num_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    r = 0
    for step in compiled.steps:
        if step[0] is _ROT:
            _rotate_rows(amps, step[1], step[2], angles[:, r])
            r += 1
        elif step[0] is _HAD:
            _hadamard_rows(amps, step[1])
        else:
            amps = amps[:, step[1]]
    return amps


def marginal_prob(amps: np.ndarray, qubit: int, outcome: int) -> np.ndarray:
    """Per-row probability of `outcome` on `qubit` for a (B, 2**n) amplitude block."""
    idx = np.arange(amps.shape[1])
    sel = ((idx >> qubit) & 1) == outcome
    return np.sum(np.abs(amps[:, sel]) ** 2, axis=1)
