"""
Full and termwise gradients of <H> by parameter shift or central differences.

For a shift ``s`` and denominator ``D`` (``s = pi/2, D = 2`` for the shift rule,
``s = eps, D = 2 eps`` for central differences) every parameter ``k`` gets two
fresh simulations from ``|0...0>`` with ``theta_k -> theta_k +- s``. Shifting a
shared HVA parameter moves every gate that reads it.

The termwise row of term ``alpha`` is ``c_alpha * (<P_alpha>_+ - <P_alpha>_-) / D``.
The full gradient is differenced from ``<H>`` evaluated through
:func:`~bpdi.statevector.hamiltonian_expectations`, a separate code path, so
summing the rows back is a real consistency check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .ansatz import AnsatzSpec, prepare_states
from .errors import BridgeViolationError, LengthMismatchError, UnsupportedMethodError
from .hamiltonian import Hamiltonian
from .statevector import hamiltonian_expectations, pauli_expectations

DEFAULT_FD_EPSILON = 1e-5
RECONSTRUCTION_RTOL = 1e-8

# amplitude budget per simulated batch (complex128 -> 64 MiB)
_MAX_BATCH_AMPS = 1 << 22


@dataclass(frozen=True)
class GradientMethod:
    kind: str = "ParameterShift"
    fd_epsilon: float = DEFAULT_FD_EPSILON

    def __post_init__(self):
        if self.kind not in ("ParameterShift", "CentralFD"):
            raise ValueError(f"unknown gradient method {self.kind!r}")
        if not self.fd_epsilon > 0:
            raise ValueError(f"fd_epsilon must be positive, got {self.fd_epsilon}")

    @property
    def shift(self) -> float:
        return math.pi / 2 if self.kind == "ParameterShift" else self.fd_epsilon

    @property
    def denominator(self) -> float:
        return 2.0 if self.kind == "ParameterShift" else 2.0 * self.fd_epsilon


PARAMETER_SHIFT = GradientMethod("ParameterShift")


def central_fd(eps: float = DEFAULT_FD_EPSILON) -> GradientMethod:
    return GradientMethod("CentralFD", eps)


def default_method(spec: AnsatzSpec, fd_epsilon: float = DEFAULT_FD_EPSILON) -> GradientMethod:
    """Parameter shift for HEA, central differences for HVA."""
    return PARAMETER_SHIFT if spec.variant == "HEA" else central_fd(fd_epsilon)


@dataclass
class TermwiseGradientMatrix:
    """``a[alpha, k] = c_alpha d_k <P_alpha>`` plus the separately computed ``g[k] = d_k <H>``."""

    a: np.ndarray
    g: np.ndarray
    method: Optional[GradientMethod] = field(default=None, compare=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    def column(self, k: int) -> np.ndarray:
        return self.a[:, k]

    def reconstruction_error(self) -> np.ndarray:
        """``|sum_alpha a[alpha, k] - g[k]| / max(1, |g[k]|)`` per parameter."""
        return np.abs(self.a.sum(axis=0) - self.g) / np.maximum(1.0, np.abs(self.g))

    def check_reconstruction(self, rtol: float = RECONSTRUCTION_RTOL) -> None:
        err = self.reconstruction_error()
        if err.size and err.max() > rtol:
            k = int(err.argmax())
            raise BridgeViolationError(f"column {k}: termwise sum deviates from full gradient by {err[k]:.3e}")

    def dump(self) -> str:
        terms, params = self.a.shape
        lines = [f"terms={terms} params={params}"]
        lines += [" ".join(repr(float(x)) for x in row) for row in self.a]
        lines.append("g " + " ".join(repr(float(x)) for x in self.g))
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "TermwiseGradientMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        header = dict(item.split("=") for item in lines[0].split())
        terms, params = int(header["terms"]), int(header["params"])
        a = np.array([[float(x) for x in ln.split()] for ln in lines[1 : 1 + terms]]).reshape(terms, params)
        g = np.full(params, np.nan)
        rest = lines[1 + terms :]
        if rest and rest[0].startswith("g "):
            g = np.array([float(x) for x in rest[0].split()[1:]])
        return cls(a, g)


def _check_method(spec: AnsatzSpec, method: GradientMethod) -> None:
    if method.kind != "ParameterShift":
        return
    if spec.has_shared_or_scaled:
        raise UnsupportedMethodError(
            f"parameter shift needs one unit-scale gate per parameter; {spec.variant} shares or scales parameters"
        )
    if any(s.param is not None and s.kind not in ("RX", "RY", "RZ") for s in spec.slots):
        raise UnsupportedMethodError("parameter shift is restricted to single-qubit rotations")


def _shifted_states(spec: AnsatzSpec, theta: np.ndarray, shift: float) -> np.ndarray:
    """States for ``theta + shift e_k`` (rows ``0..K-1``) then ``theta - shift e_k``."""
    k = spec.n_params
    eye = np.eye(k)
    thetas = np.concatenate([theta + shift * eye, theta - shift * eye])
    rows = max(1, _MAX_BATCH_AMPS >> spec.n_qubits)
    if thetas.shape[0] <= rows:
        return prepare_states(spec, thetas)
    return np.concatenate([prepare_states(spec, thetas[i : i + rows]) for i in range(0, thetas.shape[0], rows)])


def _validate(spec: AnsatzSpec, theta, H: Hamiltonian, method: GradientMethod) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (spec.n_params,):
        raise LengthMismatchError(f"expected {spec.n_params} parameters, got shape {theta.shape}")
    if H.n_qubits != spec.n_qubits:
        raise LengthMismatchError(f"H acts on {H.n_qubits} qubits, ansatz on {spec.n_qubits}")
    _check_method(spec, method)
    return theta


def grad_full(spec: AnsatzSpec, theta, H: Hamiltonian, method: GradientMethod = PARAMETER_SHIFT) -> np.ndarray:
    theta = _validate(spec, theta, H, method)
    k = spec.n_params
    energies = hamiltonian_expectations(_shifted_states(spec, theta, method.shift), H)
    return (energies[:k] - energies[k:]) / method.denominator


def grad_termwise(
    spec: AnsatzSpec, theta, H: Hamiltonian, method: GradientMethod = PARAMETER_SHIFT
) -> TermwiseGradientMatrix:
    theta = _validate(spec, theta, H, method)
    k = spec.n_params
    states = _shifted_states(spec, theta, method.shift)
    exps = pauli_expectations(states, spec.n_qubits, H.strings)
    a = H.coeffs[:, None] * (exps[:k] - exps[k:]).T / method.denominator
    energies = hamiltonian_expectations(states, H)
    g = (energies[:k] - energies[k:]) / method.denominator
    return TermwiseGradientMatrix(a, g, method)


def fd_sensitivity(spec: AnsatzSpec, theta, H: Hamiltonian, eps_list: Iterable[float]) -> dict[float, np.ndarray]:
    """Full central-difference gradient for each step size."""
    eps_list = list(eps_list)
    if not eps_list:
        raise ValueError("eps_list is empty")
    return {eps: grad_full(spec, theta, H, central_fd(eps)) for eps in eps_list}
