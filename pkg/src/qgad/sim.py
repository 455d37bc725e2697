"""Dense statevector simulation of small qubit registers.

Conventions used everywhere in this package:

* basis states are indexed little endian: qubit 0 is the least
  significant bit of the amplitude index, so |q2 q1 q0> = |110> lives at
  index 6;
* rotations follow the half-angle convention RX(t) = exp(-i t X / 2),
  likewise RY and RZ.

All operations are pure: they return new values and never mutate their
arguments.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_QUBITS = 12

_NORM_TOL = 1e-12
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class GateKind(enum.Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    H = "h"
    CNOT = "cnot"
    CSWAP = "cswap"


ROTATION_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})

_TARGET_ARITY = {GateKind.CSWAP: 2}


@dataclass(frozen=True)
class Gate:
    """A single gate application: kind, target qubits, optional controls and angle."""

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None

    def __post_init__(self) -> None:
        want_targets = _TARGET_ARITY.get(self.kind, 1)
        want_controls = 1 if self.kind in (GateKind.CNOT, GateKind.CSWAP) else 0
        if len(self.targets) != want_targets:
            raise ValueError(f"{self.kind.value} takes {want_targets} target(s)")
        if len(self.controls) != want_controls:
            raise ValueError(f"{self.kind.value} takes {want_controls} control(s)")
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise ValueError("gate qubit indices must be distinct")
        if any(q < 0 for q in qubits):
            raise ValueError("gate qubit indices must be non-negative")
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{self.kind.value} requires an angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind.value} carries no angle")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls


def rx(qubit: int, angle: float) -> Gate:
    return Gate(GateKind.RX, (qubit,), angle=float(angle))


def ry(qubit: int, angle: float) -> Gate:
    return Gate(GateKind.RY, (qubit,), angle=float(angle))


def rz(qubit: int, angle: float) -> Gate:
    return Gate(GateKind.RZ, (qubit,), angle=float(angle))


def h(qubit: int) -> Gate:
    return Gate(GateKind.H, (qubit,))


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (target,), (control,))


def cswap(control: int, qubit_a: int, qubit_b: int) -> Gate:
    return Gate(GateKind.CSWAP, (qubit_a, qubit_b), (control,))


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over 1..MAX_QUBITS qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}]")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise ValueError("amplitude length must be 2**num_qubits")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > _NORM_TOL:
            raise ValueError(f"state norm {norm!r} deviates from 1 beyond {_NORM_TOL}")
        object.__setattr__(self, "amplitudes", amps)


def new_zero_state(num_qubits: int) -> StateVector:
    """Return |0...0> on `num_qubits` qubits."""
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise ValueError(f"num_qubits must be in [1, {MAX_QUBITS}]")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def _qubit_views(amps: np.ndarray, qubit: int) -> tuple[np.ndarray, np.ndarray]:
    # Strided view with the target qubit as the middle axis; both slices
    # alias `amps`, so in-place updates write through.
    cube = amps.reshape(-1, 2, 1 << qubit)
    return cube[:, 0, :], cube[:, 1, :]


def _rotate_in_place(amps: np.ndarray, kind: GateKind, qubit: int, angle: float) -> None:
    half = 0.5 * angle
    a0, a1 = _qubit_views(amps, qubit)
    if kind is GateKind.RZ:
        a0 *= np.exp(-1j * half)
        a1 *= np.exp(1j * half)
        return
    c = math.cos(half)
    s = math.sin(half)
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


def _hadamard_in_place(amps: np.ndarray, qubit: int) -> None:
    a0, a1 = _qubit_views(amps, qubit)
    lower = a0.copy()
    a0 += a1
    a0 *= _INV_SQRT2
    a1 *= -1.0
    a1 += lower
    a1 *= _INV_SQRT2


@lru_cache(maxsize=None)
def _cnot_perm(num_qubits: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << num_qubits)
    ctrl_on = ((idx >> control) & 1) == 1
    return np.where(ctrl_on, idx ^ (1 << target), idx)


@lru_cache(maxsize=None)
def _cswap_perm(num_qubits: int, control: int, qubit_a: int, qubit_b: int) -> np.ndarray:
    idx = np.arange(1 << num_qubits)
    ctrl_on = ((idx >> control) & 1) == 1
    differ = ((idx >> qubit_a) & 1) != ((idx >> qubit_b) & 1)
    mask = (1 << qubit_a) | (1 << qubit_b)
    return np.where(ctrl_on & differ, idx ^ mask, idx)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply one gate and return the transformed state."""
    n = state.num_qubits
    if any(q >= n for q in gate.qubits):
        raise ValueError(f"gate acts on qubit outside register of size {n}")
    amps = state.amplitudes.copy()
    if gate.kind in ROTATION_KINDS:
        _rotate_in_place(amps, gate.kind, gate.targets[0], gate.angle)
    elif gate.kind is GateKind.H:
        _hadamard_in_place(amps, gate.targets[0])
    elif gate.kind is GateKind.CNOT:
        amps = amps[_cnot_perm(n, gate.controls[0], gate.targets[0])]
    else:
        amps = amps[_cswap_perm(n, gate.controls[0], *gate.targets)]
    return StateVector(n, amps)


def apply_circuit(state: StateVector, gates) -> StateVector:
    for gate in gates:
        state = apply_gate(state, gate)
    return state


def measure_prob(state: StateVector, qubit: int, outcome: int) -> float:
    """Probability of observing `outcome` on `qubit` (no collapse)."""
    if not 0 <= qubit < state.num_qubits:
        raise ValueError("qubit index out of range")
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    idx = np.arange(state.amplitudes.size)
    sel = ((idx >> qubit) & 1) == outcome
    return float(np.sum(np.abs(state.amplitudes[sel]) ** 2))


def sample_measurements(state: StateVector, qubit: int, shots: int, rng_seed: int) -> dict[str, int]:
    """Draw `shots` seeded single-qubit measurements; returns {'zeros': ..., 'ones': ...}."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p1 = min(1.0, max(0.0, measure_prob(state, qubit, 1)))
    ones = int(np.random.default_rng(rng_seed).binomial(shots, p1))
    return {"zeros": shots - ones, "ones": ones}


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced density operator over a subset of qubits.

    Row/column index is little endian over the kept qubits sorted by
    ascending original index.
    """

    num_qubits: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        mat = np.asarray(self.entries, dtype=np.complex128)
        dim = 1 << self.num_qubits
        if mat.shape != (dim, dim):
            raise ValueError("entries must be square with dim 2**num_qubits")
        object.__setattr__(self, "entries", mat)

    def validate(self) -> None:
        """Raise if the matrix is not Hermitian, unit trace, PSD (tolerances 1e-12/1e-10)."""
        mat = self.entries
        if np.max(np.abs(mat - mat.conj().T)) > 1e-12:
            raise ValueError("density matrix is not Hermitian within 1e-12")
        if abs(np.trace(mat).real - 1.0) > 1e-12 or abs(np.trace(mat).imag) > 1e-12:
            raise ValueError("density matrix trace deviates from 1 beyond 1e-12")
        if float(np.min(np.linalg.eigvalsh(mat))) < -1e-10:
            raise ValueError("density matrix has an eigenvalue below -1e-10")


def reduced_density(state: StateVector, keep) -> DensityMatrix:
    """Partial-trace every qubit not in `keep`; returns the reduced operator."""
    keep_list = list(keep)
    kept = sorted(set(keep_list))
    if not kept:
        raise ValueError("keep must name at least one qubit")
    if len(kept) != len(keep_list):
        raise ValueError("keep contains duplicate qubit indices")
    n = state.num_qubits
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError("keep contains a qubit outside the register")
    kept_set = set(kept)
    # Axis i of the reshaped tensor is qubit n-1-i; put kept qubits first,
    # most significant kept qubit leading, then the traced-out rest.
    front = [n - 1 - q for q in sorted(kept, reverse=True)]
    back = [n - 1 - q for q in range(n - 1, -1, -1) if q not in kept_set]
    tensor = state.amplitudes.reshape([2] * n).transpose(front + back)
    mat = tensor.reshape(1 << len(kept), -1)
    return DensityMatrix(len(kept), mat @ mat.conj().T)


def purity_overlap(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Tr(rho sigma) as a real number."""
    if rho.num_qubits != sigma.num_qubits:
        raise ValueError("operators act on different register sizes")
    return float(np.trace(rho.entries @ sigma.entries).real)


def swap_test(state: StateVector, ancilla: int, qubit_a: int, qubit_b: int) -> float:
    """Run the swap-test fragment H(anc), CSWAP(anc; a, b), H(anc).

    Returns P(ancilla = 0). With the two compared qubits in a product
    state across the a/b cut (each may be entangled within its own
    register) this equals (1 + Tr(rho_a rho_b)) / 2. The ancilla must be
    |0> and unentangled on entry.
    """
    if len({ancilla, qubit_a, qubit_b}) != 3:
        raise ValueError("ancilla and compared qubits must be distinct")
    state = apply_gate(state, h(ancilla))
    state = apply_gate(state, cswap(ancilla, qubit_a, qubit_b))
    state = apply_gate(state, h(ancilla))
    return measure_prob(state, ancilla, 0)
