"""
Dense-matrix reference implementations for small registers.

Nothing here reuses the statevector kernels: gates are ``expm(-i theta/2 P)``
of Kronecker-product Pauli matrices and expectations are ``psi^H M psi``.
Only meant for n <= 4.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
from scipy.linalg import expm

from .ansatz import AnsatzSpec
from .hamiltonian import Hamiltonian

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_P0 = np.diag([1.0, 0.0]).astype(complex)
_P1 = np.diag([0.0, 1.0]).astype(complex)


def dense_pauli(s: str) -> np.ndarray:
    # qubit 0 is the least significant bit, i.e. the rightmost Kronecker factor
    return reduce(np.kron, [PAULI[c] for c in reversed(s)])


def _placed(n: int, letters: dict[int, str]) -> str:
    return "".join(letters.get(q, "I") for q in range(n))


def dense_hamiltonian(H: Hamiltonian) -> np.ndarray:
    return sum(t.coeff * dense_pauli(t.string) for t in H.terms)


def dense_gate(n: int, kind: str, targets, angle=None) -> np.ndarray:
    if kind == "CNOT":
        c, t = targets
        ops0 = [PAULI["I"]] * n
        ops1 = [PAULI["I"]] * n
        ops0[c], ops1[c], ops1[t] = _P0, _P1, PAULI["X"]
        return reduce(np.kron, ops0[::-1]) + reduce(np.kron, ops1[::-1])
    letter = {"RX": "X", "RY": "Y", "RZ": "Z", "RZZ": "Z"}[kind]
    gen = dense_pauli(_placed(n, {q: letter for q in targets}))
    return expm(-0.5j * angle * gen)


def dense_state(spec: AnsatzSpec, theta) -> np.ndarray:
    n = spec.n_qubits
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1.0
    for slot in spec.slots:
        angle = None if slot.param is None else slot.scale * theta[slot.param]
        psi = dense_gate(n, slot.kind, slot.targets, angle) @ psi
    return psi


def dense_expectation(psi: np.ndarray, M: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, M @ psi)))


def dense_termwise_gradient(spec: AnsatzSpec, theta, H: Hamiltonian, eps: float = 1e-6) -> np.ndarray:
    """Central-difference termwise matrix ``(terms, params)`` from dense simulation."""
    theta = np.asarray(theta, dtype=float)
    mats = [dense_pauli(t.string) for t in H.terms]
    coeffs = H.coeffs
    a = np.zeros((len(mats), spec.n_params))
    for k in range(spec.n_params):
        plus, minus = theta.copy(), theta.copy()
        plus[k] += eps
        minus[k] -= eps
        psi_p, psi_m = dense_state(spec, plus), dense_state(spec, minus)
        for j, M in enumerate(mats):
            a[j, k] = coeffs[j] * (dense_expectation(psi_p, M) - dense_expectation(psi_m, M)) / (2 * eps)
    return a
