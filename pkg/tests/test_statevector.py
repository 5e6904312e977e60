import math

import numpy as np
import pytest

from bpdi.errors import InvalidSizeError, InvalidTargetError, LengthMismatchError
from bpdi.hamiltonian import Hamiltonian, build_lfim, build_tfim
from bpdi.oracles import PAULI, dense_gate, dense_hamiltonian, dense_pauli
from bpdi.statevector import (
    Gate,
    Statevector,
    apply_gate,
    expectation_hamiltonian,
    expectation_pauli,
    init_zero_state,
)


def basis(n, index):
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1.0
    return Statevector(n, amps)


def random_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return Statevector(n, amps / np.linalg.norm(amps))


class TestInitZero:
    def test_one_qubit(self):
        np.testing.assert_array_equal(init_zero_state(1).amps, [1, 0])

    def test_three_qubits(self):
        s = init_zero_state(3)
        assert s.amps[0] == 1 and np.count_nonzero(s.amps) == 1 and s.amps.size == 8
        assert s.norm() == 1.0

    @pytest.mark.parametrize("n", [0, 25])
    def test_out_of_range(self, n):
        with pytest.raises(InvalidSizeError):
            init_zero_state(n)


class TestGates:
    def test_cnot_endianness(self):
        # |10> means qubit 0 set, i.e. basis index 1
        out = apply_gate(basis(2, 0b01), Gate("CNOT", (0, 1)))
        np.testing.assert_array_equal(out.amps, basis(2, 0b11).amps)

    def test_cnot_control_clear(self):
        out = apply_gate(basis(2, 0b10), Gate("CNOT", (0, 1)))
        np.testing.assert_array_equal(out.amps, basis(2, 0b10).amps)

    def test_rx_pi(self):
        # exp(-i pi X / 2) = -i X, by direct 2x2 multiplication
        m = math.cos(math.pi / 2) * np.eye(2) - 1j * math.sin(math.pi / 2) * PAULI["X"]
        want = m @ np.array([1, 0])
        out = apply_gate(init_zero_state(1), Gate("RX", (0,), math.pi))
        np.testing.assert_allclose(out.amps, want, atol=1e-15)
        np.testing.assert_allclose(out.amps, [0, -1j], atol=1e-15)

    def test_rzz_on_zero(self):
        theta = 0.83
        out = apply_gate(init_zero_state(2), Gate("RZZ", (0, 1), theta))
        np.testing.assert_allclose(out.amps, [np.exp(-0.5j * theta), 0, 0, 0], atol=1e-15)

    @pytest.mark.parametrize("kind, targets", [("RX", (1,)), ("RY", (0,)), ("RZ", (2,)), ("RZZ", (0, 2)), ("CNOT", (2, 1)), ("CNOT", (0, 2))])
    def test_matches_dense(self, kind, targets):
        rng = np.random.default_rng(3)
        state = random_state(rng, 3)
        angle = None if kind == "CNOT" else 1.234
        want = dense_gate(3, kind, targets, angle) @ state.amps
        got = apply_gate(state.copy(), Gate(kind, targets, angle))
        np.testing.assert_allclose(got.amps, want, atol=1e-12)

    def test_invalid_target(self):
        with pytest.raises(InvalidTargetError):
            apply_gate(init_zero_state(2), Gate("RX", (2,), 0.1))

    def test_repeated_target(self):
        with pytest.raises(InvalidTargetError):
            Gate("CNOT", (1, 1))

    def test_inverse(self):
        rng = np.random.default_rng(4)
        for kind, t in [("RX", (0,)), ("RY", (2,)), ("RZ", (1,)), ("RZZ", (1, 3))]:
            s = random_state(rng, 4)
            th = rng.uniform(-7, 7)
            back = apply_gate(apply_gate(s.copy(), Gate(kind, t, th)), Gate(kind, t, -th))
            np.testing.assert_allclose(back.amps, s.amps, atol=1e-10, rtol=0)

    def test_norm_after_random_sequence(self):
        rng = np.random.default_rng(5)
        s = init_zero_state(5)
        for _ in range(100):
            kind = ["RX", "RY", "RZ", "RZZ", "CNOT"][rng.integers(5)]
            t = tuple(int(x) for x in rng.choice(5, size=1 if kind in ("RX", "RY", "RZ") else 2, replace=False))
            apply_gate(s, Gate(kind, t, None if kind == "CNOT" else rng.uniform(-7, 7)))
        assert abs(s.norm() - 1) < 1e-9


class TestExpectation:
    def test_zz_on_zero(self):
        assert expectation_pauli(init_zero_state(2), "ZZ") == 1.0

    @pytest.mark.parametrize("theta", [0.3, 1.2, 2.5])
    def test_ry_z_is_cos(self, theta):
        state = apply_gate(init_zero_state(1), Gate("RY", (0,), theta))
        # brute-force 2x2 simulation as a second route
        ry = np.array([[math.cos(theta / 2), -math.sin(theta / 2)], [math.sin(theta / 2), math.cos(theta / 2)]])
        psi = ry @ np.array([1.0, 0.0])
        assert expectation_pauli(state, "Z") == pytest.approx(math.cos(theta), abs=1e-14)
        assert expectation_pauli(state, "Z") == pytest.approx(psi @ PAULI["Z"].real @ psi, abs=1e-14)

    def test_plus_state_x(self):
        s = Statevector(1, np.array([1, 1], dtype=complex) / math.sqrt(2))
        assert expectation_pauli(s, "X") == pytest.approx(1.0, abs=1e-15)

    def test_y_sign(self):
        # RX(-pi/2)|0> = (|0> + i|1>)/sqrt(2) is the +1 eigenstate of Y
        s = apply_gate(init_zero_state(1), Gate("RX", (0,), -math.pi / 2))
        assert expectation_pauli(s, "Y") == pytest.approx(1.0, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            expectation_pauli(init_zero_state(2), "ZZZ")

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_random_states_vs_dense(self, n):
        rng = np.random.default_rng(10 + n)
        for _ in range(20):
            s = random_state(rng, n)
            p = "".join("IXYZ"[i] for i in rng.integers(4, size=n))
            want = np.vdot(s.amps, dense_pauli(p) @ s.amps).real
            assert abs(expectation_pauli(s, p) - want) < 1e-10

    @pytest.mark.parametrize("n, h", [(2, 0.3), (5, 1.0), (8, 2.5)])
    def test_tfim_on_zero(self, n, h):
        assert expectation_hamiltonian(init_zero_state(n), build_tfim(n, h)) == pytest.approx(-(n - 1), abs=1e-12)

    def test_lfim_on_zero(self):
        n, hz = 6, 0.5
        assert expectation_hamiltonian(init_zero_state(n), build_lfim(n, 1.0, hz)) == pytest.approx(-(n - 1) + hz * n, abs=1e-12)

    def test_two_qubit_random_vs_dense(self):
        rng = np.random.default_rng(11)
        H = Hamiltonian.from_terms(2, [(0.4, "XY"), (-1.3, "ZZ"), (0.2, "YI"), (0.9, "IX"), (0.5, "ZI")])
        for _ in range(10):
            s = random_state(rng, 2)
            want = np.vdot(s.amps, dense_hamiltonian(H) @ s.amps).real
            assert abs(expectation_hamiltonian(s, H) - want) < 1e-10

    def test_linearity(self):
        rng = np.random.default_rng(12)
        H = build_lfim(5, 0.8, 0.3)
        s = random_state(rng, 5)
        termwise = sum(t.coeff * expectation_pauli(s, t.string) for t in H.terms)
        assert abs(expectation_hamiltonian(s, H) - termwise) < 1e-12

    def test_size_mismatch(self):
        with pytest.raises(LengthMismatchError):
            expectation_hamiltonian(init_zero_state(3), build_tfim(4))


def test_dump_format():
    lines = apply_gate(init_zero_state(1), Gate("RX", (0,), math.pi)).dump().splitlines()
    assert len(lines) == 2
    idx, re, im = lines[1].split()
    assert idx == "1" and float(im) == -1.0
