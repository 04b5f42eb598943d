"""Dense statevector simulator for small qubit counts.

Amplitude indexing convention: basis index ``i`` encodes qubit ``q`` in bit
``q`` of ``i`` (qubit 0 is the least significant bit). All operations are
pure: they return new :class:`StateVector` objects and never mutate inputs.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, ResourceError

MAX_QUBITS = 24

ROTATION_KINDS = frozenset({"RX", "RY", "RZ"})
FIXED_SINGLE_KINDS = frozenset({"H"})
TWO_QUBIT_KINDS = frozenset({"CZ", "CNOT"})
GATE_KINDS = ROTATION_KINDS | FIXED_SINGLE_KINDS | TWO_QUBIT_KINDS

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def pauli_matrix(letter: str) -> np.ndarray:
    """2x2 matrix for a single Pauli letter (copy; safe to mutate)."""
    return _PAULI[letter].copy()


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=np.complex128)
    raise ContractError(f"not a rotation kind: {kind}")


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (2**self.n_qubits,):
            raise ContractError(
                f"amplitude vector of length {amps.size} does not match {self.n_qubits} qubits"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class Gate:
    """One gate: a kind, target qubit(s), and an angle for rotation kinds.

    A rotation gate with ``angle=None`` is a free parameter; its angle is
    supplied when the enclosing circuit is applied.
    """

    kind: str
    targets: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.kind not in GATE_KINDS:
            raise ContractError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if len(self.targets) != arity:
            raise ContractError(f"{self.kind} takes {arity} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ContractError(f"duplicate targets in {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ContractError(f"negative qubit index in {self.targets}")
        if self.kind not in ROTATION_KINDS and self.angle is not None:
            raise ContractError(f"{self.kind} takes no angle")

    @property
    def is_parameterized(self) -> bool:
        return self.kind in ROTATION_KINDS and self.angle is None

    def inverse(self) -> "Gate":
        if self.kind in ROTATION_KINDS:
            if self.angle is None:
                raise ContractError("cannot invert an unbound rotation")
            return Gate(self.kind, self.targets, -self.angle)
        return self  # H, CZ, CNOT are involutions


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list; ``parameter_slots`` are indices of free-angle gates."""

    n_qubits: int
    gates: tuple[Gate, ...]
    parameter_slots: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "parameter_slots", tuple(self.parameter_slots))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise ContractError(f"gate {g} out of range for {self.n_qubits} qubits")
        for slot in self.parameter_slots:
            if not (0 <= slot < len(self.gates)):
                raise ContractError(f"parameter slot {slot} out of range")
            if self.gates[slot].kind not in ROTATION_KINDS:
                raise ContractError(f"parameter slot {slot} is not a rotation gate")
        if len(set(self.parameter_slots)) != len(self.parameter_slots):
            raise ContractError("duplicate parameter slots")

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @property
    def n_parameters(self) -> int:
        return len(self.parameter_slots)

    def __add__(self, other: "Circuit") -> "Circuit":
        if self.n_qubits != other.n_qubits:
            raise ContractError("cannot concatenate circuits on different qubit counts")
        shift = len(self.gates)
        slots = self.parameter_slots + tuple(s + shift for s in other.parameter_slots)
        return Circuit(self.n_qubits, self.gates + other.gates, slots)


@dataclass(frozen=True)
class PauliString:
    """Tensor product of Pauli letters; ``letters[q]`` acts on qubit ``q``."""

    n_qubits: int
    letters: str

    def __post_init__(self):
        if len(self.letters) != self.n_qubits:
            raise ContractError(
                f"{len(self.letters)} letters for {self.n_qubits} qubits"
            )
        if any(c not in "IXYZ" for c in self.letters):
            raise ContractError(f"invalid Pauli letters {self.letters!r}")

    @property
    def weight(self) -> int:
        return sum(c != "I" for c in self.letters)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, c in enumerate(self.letters) if c != "I")

    def __str__(self):
        return self.letters


def zero_state(n_qubits: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """The all-zeros computational basis state |0...0>."""
    if n_qubits < 1:
        raise ContractError(f"need at least one qubit, got {n_qubits}")
    if n_qubits > max_qubits:
        raise ResourceError(
            f"{n_qubits} qubits exceeds the cap of {max_qubits} "
            f"(2**{n_qubits} amplitudes)"
        )
    amps = np.zeros(2**n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


@functools.lru_cache(maxsize=32)
def _indices(n: int) -> np.ndarray:
    return np.arange(2**n, dtype=np.int64)


def _apply_single(amps: np.ndarray, mat: np.ndarray, q: int, n: int) -> np.ndarray:
    # view as (high bits, target bit, low bits) and contract the middle axis
    a = amps.reshape(2 ** (n - 1 - q), 2, 2**q)
    return np.einsum("ab,ibj->iaj", mat, a).reshape(-1)


def _apply_cz(amps: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    idx = _indices(n)
    both = (((idx >> q1) & 1) & ((idx >> q2) & 1)).astype(bool)
    out = amps.copy()
    out[both] *= -1.0
    return out


def _apply_cnot(amps: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    idx = _indices(n)
    on = (((idx >> control) & 1) == 1)
    out = amps.copy()
    out[on] = amps[idx[on] ^ (1 << target)]
    return out


def apply_gate(state: StateVector, gate: Gate, angle: float | None = None) -> StateVector:
    """Apply one gate; rotation angles may be supplied for unbound gates."""
    n = state.n_qubits
    if max(gate.targets) >= n:
        raise ContractError(f"gate {gate} out of range for {n} qubits")
    amps = state.amplitudes
    if gate.kind in ROTATION_KINDS:
        theta = gate.angle if angle is None else angle
        if theta is None:
            raise ContractError(f"unbound rotation {gate} needs an angle")
        out = _apply_single(amps, rotation_matrix(gate.kind, theta), gate.targets[0], n)
    elif gate.kind == "H":
        out = _apply_single(amps, _H, gate.targets[0], n)
    elif gate.kind == "CZ":
        out = _apply_cz(amps, gate.targets[0], gate.targets[1], n)
    else:  # CNOT
        out = _apply_cnot(amps, gate.targets[0], gate.targets[1], n)
    return StateVector(n, out)


def apply_circuit(state: StateVector, circuit: Circuit, params=()) -> StateVector:
    """Run ``circuit`` on ``state`` with the given free-parameter angles."""
    if circuit.n_qubits != state.n_qubits:
        raise ContractError(
            f"circuit on {circuit.n_qubits} qubits applied to a "
            f"{state.n_qubits}-qubit state"
        )
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_parameters,):
        raise ContractError(
            f"expected {circuit.n_parameters} parameters, got {params.size}"
        )
    slot_of = {gate_idx: k for k, gate_idx in enumerate(circuit.parameter_slots)}
    n = state.n_qubits
    amps = state.amplitudes.copy()
    for i, g in enumerate(circuit.gates):
        if g.kind in ROTATION_KINDS:
            theta = params[slot_of[i]] if i in slot_of else g.angle
            if theta is None:
                raise ContractError(f"gate {i} has no angle and no parameter slot")
            amps = _apply_single(amps, rotation_matrix(g.kind, theta), g.targets[0], n)
        elif g.kind == "H":
            amps = _apply_single(amps, _H, g.targets[0], n)
        elif g.kind == "CZ":
            amps = _apply_cz(amps, g.targets[0], g.targets[1], n)
        else:
            amps = _apply_cnot(amps, g.targets[0], g.targets[1], n)
    return StateVector(n, amps)


def _parity(values: np.ndarray) -> np.ndarray:
    """Bit parity of each entry (works up to 64-bit values)."""
    v = values.copy()
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


@functools.lru_cache(maxsize=4096)
def _pauli_action(n_qubits: int, letters: str):
    """Decompose a Pauli string into a bit-flip mask and a diagonal phase.

    P|i> = phase(i) |i ^ flip>, so (P psi)[j] = phase(j ^ flip) psi[j ^ flip].
    Returns (flip, prefactor, sign) with phase(j ^ flip) = prefactor * sign[j].
    """
    flip = 0
    diag_mask = 0
    n_y = 0
    for q, c in enumerate(letters):
        if c in "XY":
            flip |= 1 << q
        if c in "YZ":
            diag_mask |= 1 << q
        if c == "Y":
            n_y += 1
    idx = _indices(n_qubits)
    sign = 1 - 2 * _parity((idx ^ flip) & diag_mask).astype(np.int8)
    return flip, 1j**n_y, sign


def expectation(state: StateVector, pauli: PauliString) -> float:
    """Exact expectation value <psi|P|psi> of a Pauli string."""
    if pauli.n_qubits != state.n_qubits:
        raise ContractError(
            f"{pauli.n_qubits}-qubit string measured on a "
            f"{state.n_qubits}-qubit state"
        )
    flip, prefactor, sign = _pauli_action(state.n_qubits, pauli.letters)
    amps = state.amplitudes
    permuted = amps[_indices(state.n_qubits) ^ flip] if flip else amps
    value = prefactor * np.vdot(amps, sign * permuted)
    if abs(value.imag) >= 1e-10:
        raise AssertionError(
            f"non-Hermitian expectation residue {value.imag:.3e} for {pauli}"
        )
    return float(value.real)
