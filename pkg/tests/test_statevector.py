import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_expectation, random_state
from paulicut.errors import ContractError, ResourceError
from paulicut.statevector import (
    Circuit,
    Gate,
    PauliString,
    StateVector,
    apply_circuit,
    apply_gate,
    expectation,
    zero_state,
)

INV_SQRT2 = 1 / math.sqrt(2)


class TestZeroState:
    def test_single_qubit(self):
        sv = zero_state(1)
        np.testing.assert_allclose(sv.amplitudes, [1.0, 0.0])

    def test_two_qubits(self):
        sv = zero_state(2)
        assert abs(sv.norm - 1.0) < 1e-12
        assert sv.amplitudes[0] == 1.0

    def test_nine_qubits_has_512_amplitudes(self):
        assert zero_state(9).amplitudes.size == 512

    def test_cap_enforced(self):
        with pytest.raises(ResourceError, match="24"):
            zero_state(25)

    def test_cap_configurable(self):
        with pytest.raises(ResourceError):
            zero_state(5, max_qubits=4)

    def test_nonpositive_rejected(self):
        with pytest.raises(ContractError):
            zero_state(0)


class TestGates:
    def test_hadamard_on_zero(self):
        sv = apply_gate(zero_state(1), Gate("H", (0,)))
        np.testing.assert_allclose(sv.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-12)

    def test_ry_pi_flips_to_one(self):
        sv = apply_gate(zero_state(1), Gate("RY", (0,), math.pi))
        np.testing.assert_allclose(np.abs(sv.amplitudes), [0.0, 1.0], atol=1e-12)

    def test_rx_pi_flips_up_to_phase(self):
        sv = apply_gate(zero_state(1), Gate("RX", (0,), math.pi))
        np.testing.assert_allclose(np.abs(sv.amplitudes), [0.0, 1.0], atol=1e-12)

    def test_cnot_flips_target_when_control_set(self):
        sv = apply_gate(zero_state(2), Gate("RY", (0,), math.pi))  # |01> (qubit0=1)
        sv = apply_gate(sv, Gate("CNOT", (0, 1)))
        probs = sv.probabilities()
        assert probs[3] == pytest.approx(1.0)

    def test_cnot_idle_when_control_clear(self):
        sv = apply_gate(zero_state(2), Gate("CNOT", (0, 1)))
        assert sv.probabilities()[0] == pytest.approx(1.0)

    def test_cz_fixes_all_zeros(self):
        sv = apply_gate(zero_state(2), Gate("CZ", (0, 1)))
        np.testing.assert_allclose(sv.amplitudes, zero_state(2).amplitudes)

    def test_gate_then_inverse_restores_state(self):
        rng = np.random.default_rng(11)
        sv = StateVector(3, random_state(3, rng))
        gates = [
            Gate("RX", (0,), 0.7),
            Gate("RY", (1,), -1.3),
            Gate("RZ", (2,), 2.1),
            Gate("H", (1,)),
            Gate("CZ", (0, 2)),
            Gate("CNOT", (2, 1)),
        ]
        for g in gates:
            out = apply_gate(apply_gate(sv, g), g.inverse())
            np.testing.assert_allclose(out.amplitudes, sv.amplitudes, atol=1e-10)

    def test_duplicate_targets_rejected(self):
        with pytest.raises(ContractError):
            Gate("CZ", (1, 1))

    def test_out_of_range_target_rejected(self):
        with pytest.raises(ContractError):
            apply_gate(zero_state(1), Gate("H", (3,)))


class TestCircuit:
    def _bell_circuit(self):
        return Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1))))

    def test_bell_state(self):
        sv = apply_circuit(zero_state(2), self._bell_circuit())
        np.testing.assert_allclose(
            sv.amplitudes, [INV_SQRT2, 0, 0, INV_SQRT2], atol=1e-12
        )

    def test_gate_count_accessor(self):
        assert self._bell_circuit().gate_count == 2

    def test_wrong_parameter_length_rejected(self):
        circ = Circuit(1, (Gate("RY", (0,)),), parameter_slots=(0,))
        with pytest.raises(ContractError):
            apply_circuit(zero_state(1), circ, [])
        with pytest.raises(ContractError):
            apply_circuit(zero_state(1), circ, [0.1, 0.2])

    def test_qubit_mismatch_rejected(self):
        with pytest.raises(ContractError):
            apply_circuit(zero_state(3), self._bell_circuit())

    def test_all_zero_angles_with_cz_is_identity(self):
        gates = []
        slots = []
        for q in range(3):
            slots.append(len(gates))
            gates.append(Gate("RY", (q,)))
            slots.append(len(gates))
            gates.append(Gate("RZ", (q,)))
        gates.append(Gate("CZ", (0, 1)))
        gates.append(Gate("CZ", (1, 2)))
        circ = Circuit(3, tuple(gates), tuple(slots))
        sv = apply_circuit(zero_state(3), circ, np.zeros(6))
        np.testing.assert_allclose(sv.amplitudes, zero_state(3).amplitudes, atol=1e-12)

    def test_input_state_unmodified(self):
        start = zero_state(2)
        before = start.amplitudes.copy()
        apply_circuit(start, self._bell_circuit())
        np.testing.assert_array_equal(start.amplitudes, before)

    def test_concatenation_matches_sequential_application(self):
        rng = np.random.default_rng(5)
        c1 = Circuit(2, (Gate("RY", (0,)), Gate("CZ", (0, 1))), (0,))
        c2 = Circuit(2, (Gate("RX", (1,)), Gate("H", (0,))), (0,))
        p1, p2 = rng.uniform(-3, 3, 1), rng.uniform(-3, 3, 1)
        via_two = apply_circuit(apply_circuit(zero_state(2), c1, p1), c2, p2)
        via_one = apply_circuit(zero_state(2), c1 + c2, np.concatenate([p1, p2]))
        np.testing.assert_allclose(via_two.amplitudes, via_one.amplitudes, atol=1e-10)


def _random_circuit(n, rng, depth=12):
    gates = []
    slots = []
    kinds = ["RX", "RY", "RZ", "H"]
    if n >= 2:
        kinds += ["CZ", "CNOT"]
    for _ in range(depth):
        kind = kinds[rng.integers(len(kinds))]
        if kind in ("CZ", "CNOT"):
            q1, q2 = rng.choice(n, size=2, replace=False)
            gates.append(Gate(kind, (int(q1), int(q2))))
        elif kind == "H":
            gates.append(Gate(kind, (int(rng.integers(n)),)))
        else:
            slots.append(len(gates))
            gates.append(Gate(kind, (int(rng.integers(n)),)))
    return Circuit(n, tuple(gates), tuple(slots))


class TestNormPreservation:
    def test_hundred_random_circuits(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            circ = _random_circuit(n, rng)
            params = rng.uniform(-np.pi, np.pi, circ.n_parameters)
            sv = apply_circuit(zero_state(n), circ, params)
            assert abs(sv.norm - 1.0) < 1e-10


class TestExpectation:
    def test_z_on_zero_is_plus_one(self):
        assert expectation(zero_state(1), PauliString(1, "Z")) == pytest.approx(1.0)

    def test_z_on_one_is_minus_one(self):
        sv = apply_gate(zero_state(1), Gate("RY", (0,), math.pi))
        assert expectation(sv, PauliString(1, "Z")) == pytest.approx(-1.0)

    def test_xx_on_bell_state(self):
        bell = apply_circuit(zero_state(2), Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1)))))
        assert expectation(bell, PauliString(2, "XX")) == pytest.approx(1.0)

    def test_mismatched_widths_rejected(self):
        with pytest.raises(ContractError):
            expectation(zero_state(2), PauliString(3, "XXZ"))

    def test_twenty_random_strings_match_dense_oracle(self):
        rng = np.random.default_rng(77)
        letters = "IXYZ"
        for _ in range(20):
            n = 3
            sv = StateVector(n, random_state(n, rng))
            word = "".join(letters[rng.integers(4)] for _ in range(n))
            expected = dense_expectation(sv.amplitudes, word)
            assert expectation(sv, PauliString(n, word)) == pytest.approx(expected, abs=1e-9)

    def test_all_low_weight_strings_match_dense_oracle(self):
        rng = np.random.default_rng(123)
        for n in (1, 2, 3, 4):
            sv = StateVector(n, random_state(n, rng))
            for word in itertools.product("IXYZ", repeat=n):
                word = "".join(word)
                if sum(c != "I" for c in word) > 3:
                    continue
                got = expectation(sv, PauliString(n, word))
                assert got == pytest.approx(dense_expectation(sv.amplitudes, word), abs=1e-9)
                assert -1 - 1e-12 <= got <= 1 + 1e-12


@given(seed=st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_expectation_bounded_and_real(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 5))
    sv = StateVector(n, random_state(n, rng))
    word = "".join("IXYZ"[rng.integers(4)] for _ in range(n))
    value = expectation(sv, PauliString(n, word))
    assert isinstance(value, float)
    assert -1 - 1e-12 <= value <= 1 + 1e-12


class TestPauliString:
    def test_weight_and_support(self):
        s = PauliString(4, "XIZI")
        assert s.weight == 2
        assert s.support == (0, 2)

    def test_bad_letters_rejected(self):
        with pytest.raises(ContractError):
            PauliString(2, "XQ")

    def test_length_mismatch_rejected(self):
        with pytest.raises(ContractError):
            PauliString(3, "XX")
