"""
HEA and HVA circuit programs for the Ising models.

An ansatz is a flat list of slots. A rotation slot reads ``theta[param]`` and
applies the rotation with angle ``scale * theta[param]``; HVA slots share one
parameter per block per layer and use ``scale = 2`` (``R_x(2 beta)``,
``R_zz(2 gamma)``, ``R_z(2 delta)``).

Parameter layout
----------------
HEA, layer ``l``: ``R_y`` on qubit ``q`` reads ``2*n*l + q``, ``R_z`` on qubit
``q`` reads ``2*n*l + n + q``.
HVA, layer ``l``: beta is ``b*l``, gamma is ``b*l + 1``, delta (LFIM only) is
``b*l + 2``, where ``b`` is the block count per layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidSizeError, LengthMismatchError
from .statevector import (
    Statevector,
    apply_cnot,
    apply_rotation,
    zero_states,
)

VARIANTS = ("HEA", "HVA")
MODELS = ("TFIM", "LFIM")
ENTANGLERS = ("ring", "line")


@dataclass(frozen=True)
class Slot:
    kind: str
    targets: tuple[int, ...]
    param: Optional[int] = None
    scale: float = 1.0

    def describe(self) -> str:
        targets = ",".join(str(t) for t in self.targets)
        if self.param is None:
            return f"{self.kind} {targets}"
        return f"{self.kind} {targets} param={self.param} scale={self.scale:g}"


@dataclass(frozen=True)
class AnsatzSpec:
    variant: str
    model: str
    n_qubits: int
    depth: int
    slots: tuple[Slot, ...]
    n_params: int

    def dump(self) -> str:
        """Gate program, one slot per line."""
        return "".join(s.describe() + "\n" for s in self.slots)

    def gates_for(self, k: int) -> list[int]:
        """Slot indices reading parameter ``k``."""
        return [i for i, s in enumerate(self.slots) if s.param == k]

    @property
    def has_shared_or_scaled(self) -> bool:
        counts = np.bincount([s.param for s in self.slots if s.param is not None], minlength=self.n_params)
        scaled = any(s.scale != 1.0 for s in self.slots if s.param is not None)
        return bool(np.any(counts != 1)) or scaled


def _check_sizes(n: int, d: int) -> None:
    if n < 2:
        raise InvalidSizeError(f"ansatz needs n >= 2, got {n}")
    if d < 1:
        raise InvalidSizeError(f"ansatz needs depth >= 1, got {d}")


def build_hea(n: int, d: int, entangler: str = "ring", model: str = "TFIM") -> AnsatzSpec:
    """R_y then R_z on every qubit, then a CNOT chain closed into a ring.

    With ``entangler="line"`` the closing ``CNOT(n-1, 0)`` is left out.
    """
    _check_sizes(n, d)
    if entangler not in ENTANGLERS:
        raise ValueError(f"entangler must be one of {ENTANGLERS}, got {entangler!r}")
    slots = []
    for layer in range(d):
        base = 2 * n * layer
        slots += [Slot("RY", (q,), base + q) for q in range(n)]
        slots += [Slot("RZ", (q,), base + n + q) for q in range(n)]
        slots += [Slot("CNOT", (q, q + 1)) for q in range(n - 1)]
        if entangler == "ring":
            slots.append(Slot("CNOT", (n - 1, 0)))
    return AnsatzSpec("HEA", model, n, d, tuple(slots), 2 * n * d)


def build_hva(n: int, d: int, model: str = "TFIM") -> AnsatzSpec:
    """Field block ``R_x(2 beta)``, open-chain ``R_zz(2 gamma)`` block and, for LFIM, ``R_z(2 delta)``."""
    _check_sizes(n, d)
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    blocks = 3 if model == "LFIM" else 2
    slots = []
    for layer in range(d):
        beta = blocks * layer
        slots += [Slot("RX", (q,), beta, 2.0) for q in range(n)]
        slots += [Slot("RZZ", (q, q + 1), beta + 1, 2.0) for q in range(n - 1)]
        if model == "LFIM":
            slots += [Slot("RZ", (q,), beta + 2, 2.0) for q in range(n)]
    return AnsatzSpec("HVA", model, n, d, tuple(slots), blocks * d)


def build_ansatz(variant: str, n: int, d: int, model: str = "TFIM", entangler: str = "ring") -> AnsatzSpec:
    if variant == "HEA":
        return build_hea(n, d, entangler=entangler, model=model)
    if variant == "HVA":
        return build_hva(n, d, model=model)
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def prepare_states(spec: AnsatzSpec, thetas: np.ndarray) -> np.ndarray:
    """Simulate the circuit from ``|0...0>`` for each row of ``thetas`` (shape ``(B, K)``).

    Returns amplitudes of shape ``(B, 2**n)``.
    """
    thetas = np.asarray(thetas, dtype=float)
    if thetas.ndim != 2 or thetas.shape[1] != spec.n_params:
        raise LengthMismatchError(f"expected thetas of shape (B, {spec.n_params}), got {thetas.shape}")
    n = spec.n_qubits
    amps = zero_states(n, thetas.shape[0])
    for slot in spec.slots:
        if slot.param is None:
            amps = apply_cnot(amps, n, *slot.targets)
        else:
            amps = apply_rotation(amps, n, slot.kind, slot.targets, slot.scale * thetas[:, slot.param])
    return amps


def prepare_state(spec: AnsatzSpec, theta) -> Statevector:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.n_params,):
        raise LengthMismatchError(f"expected {spec.n_params} parameters, got shape {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("theta has non-finite entries")
    return Statevector(spec.n_qubits, prepare_states(spec, theta[None, :])[0])
