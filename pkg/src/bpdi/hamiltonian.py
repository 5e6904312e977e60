"""
Real-coefficient Pauli-string Hamiltonians and the Ising instances.

A Pauli string is stored as a plain letter string over ``IXYZ``; the letter at
position ``i`` acts on qubit ``i``, which is bit ``i`` of a basis index. So
``"ZZII"`` is Z on qubits 0 and 1 of a four-qubit register.

    H = sum_alpha c_alpha P_alpha

Term order is fixed at construction and is the row order of every termwise
gradient matrix built from the Hamiltonian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from .errors import InvalidSizeError, LengthMismatchError

PAULI_LETTERS = frozenset("IXYZ")

DEFAULT_H = 1.0
DEFAULT_HX = 1.0
DEFAULT_HZ = 0.5


def _check_string(s: str, n_qubits: int) -> None:
    if len(s) != n_qubits:
        raise LengthMismatchError(f"Pauli string {s!r} has length {len(s)}, expected {n_qubits}")
    bad = set(s) - PAULI_LETTERS
    if bad:
        raise ValueError(f"invalid Pauli letters {sorted(bad)} in {s!r}")


def pauli_masks(s: str) -> tuple[int, int, int]:
    """Return ``(flip_mask, phase_mask, n_y)`` for a letter string.

    ``P|j> = i**n_y * (-1)**popcount(j & phase_mask) |j ^ flip_mask>``.
    """
    flip = phase = n_y = 0
    for q, letter in enumerate(s):
        bit = 1 << q
        if letter in "XY":
            flip |= bit
        if letter in "YZ":
            phase |= bit
        if letter == "Y":
            n_y += 1
    return flip, phase, n_y


def weight(s: str) -> int:
    return sum(1 for c in s if c != "I")


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    string: str

    def __post_init__(self):
        if not math.isfinite(self.coeff) or self.coeff == 0.0:
            raise ValueError(f"term coefficient must be finite and nonzero, got {self.coeff}")
        if weight(self.string) == 0:
            raise ValueError("identity terms are not allowed")

    def __str__(self) -> str:
        return f"{self.coeff!r} {self.string}"


@dataclass(frozen=True, eq=True)
class Hamiltonian:
    """Ordered, duplicate-free list of Pauli terms on ``n_qubits`` qubits.

    Build through :meth:`from_terms` (or the Ising factories) so duplicate
    strings are merged; the constructor only validates.
    """

    n_qubits: int
    terms: tuple[PauliTerm, ...]

    def __post_init__(self):
        if self.n_qubits < 1:
            raise InvalidSizeError(f"n_qubits must be positive, got {self.n_qubits}")
        seen = set()
        for t in self.terms:
            _check_string(t.string, self.n_qubits)
            if t.string in seen:
                raise ValueError(f"duplicate Pauli string {t.string}")
            seen.add(t.string)

    @classmethod
    def from_terms(cls, n_qubits: int, terms: Iterable[tuple[float, str]]) -> "Hamiltonian":
        """Merge ``(coeff, string)`` pairs, keeping first-appearance order.

        Strings whose merged coefficient is exactly zero are dropped.
        """
        merged: dict[str, float] = {}
        for coeff, s in terms:
            _check_string(s, n_qubits)
            merged[s] = merged.get(s, 0.0) + float(coeff)
        return cls(n_qubits, tuple(PauliTerm(c, s) for s, c in merged.items() if c != 0.0))

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([t.coeff for t in self.terms], dtype=float)

    @property
    def strings(self) -> list[str]:
        return [t.string for t in self.terms]

    @cached_property
    def diagonal(self) -> np.ndarray:
        """Diagonal of the Z-type part of H in the computational basis."""
        idx = np.arange(1 << self.n_qubits)
        diag = np.zeros(1 << self.n_qubits)
        for t in self.terms:
            flip, phase, _ = pauli_masks(t.string)
            if flip == 0:
                diag += t.coeff * _parity_sign(idx, phase)
        return diag

    def to_text(self) -> str:
        return "".join(f"{t}\n" for t in self.terms)

    @classmethod
    def from_text(cls, text: str) -> "Hamiltonian":
        pairs = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            coeff, s = line.split()
            pairs.append((float(coeff), s))
        if not pairs:
            raise ValueError("empty Hamiltonian text")
        return cls.from_terms(len(pairs[0][1]), pairs)

    def __len__(self) -> int:
        return len(self.terms)


def _parity_sign(idx: np.ndarray, mask: int) -> np.ndarray:
    bits = np.bitwise_and(idx, mask)
    parity = np.zeros_like(bits)
    while mask:
        parity ^= bits & 1
        bits = bits >> 1
        mask >>= 1
    return 1.0 - 2.0 * parity


def _single(n: int, letters: dict[int, str]) -> str:
    return "".join(letters.get(q, "I") for q in range(n))


def build_tfim(n: int, h: float = DEFAULT_H) -> Hamiltonian:
    """Open-boundary TFIM: ``-sum Z_i Z_{i+1} + h sum X_i``."""
    if n < 2:
        raise InvalidSizeError(f"TFIM needs n >= 2, got {n}")
    terms = [(-1.0, _single(n, {i: "Z", i + 1: "Z"})) for i in range(n - 1)]
    terms += [(h, _single(n, {i: "X"})) for i in range(n)]
    return Hamiltonian.from_terms(n, terms)


def build_lfim(n: int, hx: float = DEFAULT_HX, hz: float = DEFAULT_HZ) -> Hamiltonian:
    """TFIM plus a longitudinal field ``hz sum Z_i``; the Z block is omitted when hz == 0."""
    if n < 2:
        raise InvalidSizeError(f"LFIM needs n >= 2, got {n}")
    terms = [(-1.0, _single(n, {i: "Z", i + 1: "Z"})) for i in range(n - 1)]
    terms += [(hx, _single(n, {i: "X"})) for i in range(n)]
    if hz != 0.0:
        terms += [(hz, _single(n, {i: "Z"})) for i in range(n)]
    return Hamiltonian.from_terms(n, terms)


def term_count(H: Hamiltonian) -> int:
    return len(H.terms)
