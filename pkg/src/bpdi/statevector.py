"""
Exact statevector simulation on 2**n complex amplitudes.

Conventions
-----------
- Qubit ``q`` is bit ``q`` of the basis index (qubit 0 is the least
  significant bit). Ket labels in docs list qubit 0 first, so ``|10>`` has
  qubit 0 set and is index 1.
- ``R_P(theta) = exp(-i theta/2 P)`` for ``P`` in X, Y, Z and Z⊗Z.
- ``CNOT`` targets are ``(control, target)``.

Every kernel accepts amplitude arrays of shape ``(..., 2**n)`` so that many
circuits differing only in their angles can be simulated in one pass; the
angle argument broadcasts against the leading batch shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidSizeError, InvalidTargetError, LengthMismatchError
from .hamiltonian import Hamiltonian, pauli_masks

MAX_QUBITS = 24
IMAG_TOL = 1e-10

ROTATIONS = ("RX", "RY", "RZ", "RZZ")
GATE_KINDS = ROTATIONS + ("CNOT",)
_ARITY = {"RX": 1, "RY": 1, "RZ": 1, "RZZ": 2, "CNOT": 2}


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _ARITY[self.kind]:
            raise InvalidTargetError(f"{self.kind} takes {_ARITY[self.kind]} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise InvalidTargetError(f"{self.kind} targets must be distinct, got {self.targets}")
        if (self.kind == "CNOT") != (self.angle is None):
            raise ValueError(f"{self.kind}: angle must be given iff the gate is a rotation")


@dataclass
class Statevector:
    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.amps.shape != (1 << self.n_qubits,):
            raise LengthMismatchError(f"expected {1 << self.n_qubits} amplitudes, got {self.amps.shape}")

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amps.copy())

    def dump(self) -> str:
        """``index real imag`` per line."""
        return "".join(f"{i} {float(a.real)!r} {float(a.imag)!r}\n" for i, a in enumerate(self.amps))


def init_zero_state(n: int) -> Statevector:
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidSizeError(f"n must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1.0
    return Statevector(n, amps)


def zero_states(n: int, batch: int) -> np.ndarray:
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidSizeError(f"n must be in [1, {MAX_QUBITS}], got {n}")
    amps = np.zeros((batch, 1 << n), dtype=complex)
    amps[:, 0] = 1.0
    return amps


# --- precomputed index tables -------------------------------------------------


@lru_cache(maxsize=None)
def _zz_sign(n: int, q1: int, q2: int) -> np.ndarray:
    idx = np.arange(1 << n)
    parity = ((idx >> q1) ^ (idx >> q2)) & 1
    return 1.0 - 2.0 * parity


@lru_cache(maxsize=None)
def _z_sign(n: int, q: int) -> np.ndarray:
    return 1.0 - 2.0 * ((np.arange(1 << n) >> q) & 1)


@lru_cache(maxsize=None)
def _cnot_perm(n: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return np.where((idx >> control) & 1, idx ^ (1 << target), idx)


@lru_cache(maxsize=None)
def _pauli_tables(n: int, s: str) -> tuple[np.ndarray, np.ndarray, complex]:
    flip, phase, n_y = pauli_masks(s)
    idx = np.arange(1 << n)
    bits = idx & phase
    parity = np.zeros_like(idx)
    for q in range(n):
        parity ^= (bits >> q) & 1
    return idx ^ flip, 1.0 - 2.0 * parity, 1j**n_y


# --- kernels ----------------------------------------------------------------------


def _pair_view(amps: np.ndarray, n: int, q: int) -> np.ndarray:
    return amps.reshape(amps.shape[:-1] + (1 << (n - q - 1), 2, 1 << q))


def apply_rotation(amps: np.ndarray, n: int, kind: str, targets: Sequence[int], angle) -> np.ndarray:
    """Return ``R_kind(angle)`` applied to ``amps`` (shape ``(..., 2**n)``).

    ``angle`` is a scalar or an array broadcastable to ``amps.shape[:-1]``.
    """
    angle = np.asarray(angle, dtype=float)
    c = np.cos(angle / 2)[..., None]
    s = np.sin(angle / 2)[..., None]
    if kind == "RZZ":
        sign = _zz_sign(n, targets[0], targets[1])
        return amps * (c - 1j * s * sign)
    q = targets[0]
    if kind == "RZ":
        return amps * (c - 1j * s * _z_sign(n, q))
    v = _pair_view(amps, n, q)
    a0, a1 = v[..., 0, :], v[..., 1, :]
    c, s = c[..., None], s[..., None]
    out = np.empty_like(v)
    if kind == "RX":
        out[..., 0, :] = c * a0 - 1j * s * a1
        out[..., 1, :] = c * a1 - 1j * s * a0
    elif kind == "RY":
        out[..., 0, :] = c * a0 - s * a1
        out[..., 1, :] = s * a0 + c * a1
    else:
        raise ValueError(f"unknown rotation {kind!r}")
    return out.reshape(amps.shape)


def apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    return amps[..., _cnot_perm(n, control, target)]


def _check_targets(n: int, targets: Sequence[int]) -> None:
    for t in targets:
        if not 0 <= t < n:
            raise InvalidTargetError(f"target {t} out of range for {n} qubits")


def apply_gate(state: Statevector, g: Gate) -> Statevector:
    """Apply ``g`` to ``state`` in place and return it."""
    _check_targets(state.n_qubits, g.targets)
    if g.kind == "CNOT":
        state.amps = apply_cnot(state.amps, state.n_qubits, *g.targets)
    else:
        state.amps = apply_rotation(state.amps, state.n_qubits, g.kind, g.targets, g.angle)
    return state


# --- expectation values -----------------------------------------------------------


def _real(values: np.ndarray) -> np.ndarray:
    resid = np.max(np.abs(np.imag(values))) if np.size(values) else 0.0
    if resid > IMAG_TOL:
        raise ArithmeticError(f"expectation has imaginary residue {resid:.3e}")
    return np.real(values)


def pauli_expectations(amps: np.ndarray, n: int, strings: Sequence[str]) -> np.ndarray:
    """``<P>`` for each string over a batch; returns shape ``amps.shape[:-1] + (len(strings),)``."""
    probs = None
    out = np.empty(amps.shape[:-1] + (len(strings),))
    for j, s in enumerate(strings):
        if len(s) != n:
            raise LengthMismatchError(f"Pauli string {s!r} does not match {n} qubits")
        partner, sign, global_phase = _pauli_tables(n, s)
        if "X" not in s and "Y" not in s:
            if probs is None:
                probs = (amps * amps.conj()).real
            out[..., j] = probs @ sign
        else:
            val = global_phase * np.sum(amps * sign * amps[..., partner].conj(), axis=-1)
            out[..., j] = _real(val)
    return out


def expectation_pauli(state: Statevector, p: str) -> float:
    return float(pauli_expectations(state.amps, state.n_qubits, [p])[0])


def hamiltonian_expectations(amps: np.ndarray, H: Hamiltonian) -> np.ndarray:
    """``<H>`` over a batch.

    The diagonal part is one dot product against ``H.diagonal``; only the
    off-diagonal terms are visited individually.
    """
    n = H.n_qubits
    if amps.shape[-1] != 1 << n:
        raise LengthMismatchError(f"state has {amps.shape[-1]} amplitudes, H acts on {n} qubits")
    total = (amps * amps.conj()).real @ H.diagonal
    for t in H.terms:
        if "X" in t.string or "Y" in t.string:
            partner, sign, global_phase = _pauli_tables(n, t.string)
            val = global_phase * np.sum(amps * sign * amps[..., partner].conj(), axis=-1)
            total = total + t.coeff * _real(val)
    return total


def expectation_hamiltonian(state: Statevector, H: Hamiltonian) -> float:
    if state.n_qubits != H.n_qubits:
        raise LengthMismatchError(f"state has {state.n_qubits} qubits, H has {H.n_qubits}")
    return float(hamiltonian_expectations(state.amps, H))
