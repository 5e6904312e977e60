"""Randomized invariant suite behind ``bpdi check``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .ansatz import build_hea, build_hva
from .diagnostics import (
    bridge_check,
    cancellation_ratio,
    count_nonzero,
    effective_term_count,
    interference_quality,
)
from .gradients import PARAMETER_SHIFT, central_fd, grad_full, grad_termwise
from .hamiltonian import build_lfim, build_tfim
from .oracles import dense_pauli, dense_termwise_gradient
from .statevector import apply_cnot, apply_rotation, pauli_expectations, zero_states


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _columns(rng: np.random.Generator, cases: int) -> list[np.ndarray]:
    cols = []
    for _ in range(cases):
        m = int(rng.integers(1, 30))
        col = rng.normal(size=m) * 10.0 ** rng.uniform(-3, 3)
        if rng.random() < 0.1:
            col = np.abs(col)
        cols.append(col)
    return cols


def check_bridge(rng, cases) -> CheckResult:
    worst = 0.0
    for col in _columns(rng, cases):
        _, _, err = bridge_check(col)
        worst = max(worst, err / max(1.0, float(np.sum(col * col))))
    return CheckResult("bridge identity", worst <= 1e-10, f"max relative error {worst:.2e} over {cases} columns")


def check_scale_invariance(rng, cases) -> CheckResult:
    worst = 0.0
    for col in _columns(rng, cases):
        c = rng.choice([-1.0, 1.0]) * 10.0 ** rng.uniform(-4, 4)
        for f in (cancellation_ratio, effective_term_count, interference_quality):
            worst = max(worst, abs(f(col) - f(c * col)))
    return CheckResult("scale invariance", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_permutation_invariance(rng, cases) -> CheckResult:
    worst = 0.0
    for col in _columns(rng, cases):
        perm = rng.permutation(col)
        for f in (cancellation_ratio, effective_term_count, interference_quality):
            worst = max(worst, abs(f(col) - f(perm)))
    return CheckResult("permutation invariance", worst <= 1e-12, f"max deviation {worst:.2e}")


def check_bound_chain(rng, cases) -> CheckResult:
    bad = 0
    for col in _columns(rng, cases):
        b, neff = interference_quality(col), effective_term_count(col)
        r = cancellation_ratio(col)
        tol = 1e-12 * max(1.0, neff)
        ok = 0.0 <= r <= 1.0 and 1.0 - tol <= neff <= count_nonzero(col) + tol and b <= math.sqrt(neff) + tol
        same_sign = np.all(col >= 0) or np.all(col <= 0)
        if same_sign:
            ok = ok and abs(b - math.sqrt(neff)) <= 1e-12 * max(1.0, neff)
        else:
            ok = ok and b < math.sqrt(neff)
        bad += not ok
    return CheckResult("bound chain B <= sqrt(N_eff) <= sqrt(nnz)", bad == 0, f"{bad} violations in {cases} columns")


_KINDS = ("RX", "RY", "RZ", "RZZ", "CNOT")


def _random_program(rng, n: int, length: int) -> list[tuple[str, tuple[int, ...]]]:
    prog = []
    for _ in range(length):
        kind = _KINDS[rng.integers(len(_KINDS))]
        if kind in ("RZZ", "CNOT"):
            a, b = rng.choice(n, size=2, replace=False)
            prog.append((kind, (int(a), int(b))))
        else:
            prog.append((kind, (int(rng.integers(n)),)))
    return prog


def _run_program(amps, n, prog, angles):
    for j, (kind, targets) in enumerate(prog):
        if kind == "CNOT":
            amps = apply_cnot(amps, n, *targets)
        else:
            amps = apply_rotation(amps, n, kind, targets, angles[:, j])
    return amps


def _batches(cases: int, per: int = 100):
    done = 0
    while done < cases:
        size = min(per, cases - done)
        yield size
        done += size


def check_norm(rng, cases) -> CheckResult:
    worst = 0.0
    for size in _batches(cases):
        n = int(rng.integers(2, 6))
        prog = _random_program(rng, n, 100)
        angles = rng.uniform(-2 * np.pi, 2 * np.pi, size=(size, 100))
        amps = _run_program(zero_states(n, size), n, prog, angles)
        worst = max(worst, float(np.max(np.abs(np.sum(np.abs(amps) ** 2, axis=1) - 1))))
    return CheckResult("norm preservation (100-gate programs)", worst < 1e-9, f"max |norm - 1| = {worst:.2e}")


def _random_states(rng, n, size):
    amps = rng.normal(size=(size, 1 << n)) + 1j * rng.normal(size=(size, 1 << n))
    return amps / np.linalg.norm(amps, axis=1, keepdims=True)


def check_inverse(rng, cases) -> CheckResult:
    worst = 0.0
    for size in _batches(cases):
        n = int(rng.integers(2, 6))
        amps = _random_states(rng, n, size)
        kind = ("RX", "RY", "RZ", "RZZ")[rng.integers(4)]
        targets = tuple(int(x) for x in rng.choice(n, size=2 if kind == "RZZ" else 1, replace=False))
        th = rng.uniform(-2 * np.pi, 2 * np.pi, size)
        back = apply_rotation(apply_rotation(amps, n, kind, targets, th), n, kind, targets, -th)
        worst = max(worst, float(np.max(np.abs(back - amps))))
    return CheckResult("rotation inverse R(t) R(-t) = 1", worst <= 1e-10, f"max deviation {worst:.2e}")


def check_pauli_oracle(rng, cases) -> CheckResult:
    worst = 0.0
    for size in _batches(cases):
        n = int(rng.integers(1, 5))
        s = "".join("IXYZ"[i] for i in rng.integers(4, size=n))
        amps = _random_states(rng, n, size)
        got = pauli_expectations(amps, n, [s])[:, 0]
        M = dense_pauli(s)
        want = np.real(np.einsum("bi,ij,bj->b", amps.conj(), M, amps))
        worst = max(worst, float(np.max(np.abs(got - want))))
    return CheckResult("Pauli expectation vs dense oracle (n <= 4)", worst <= 1e-10, f"max deviation {worst:.2e}")


def check_ps_vs_fd(rng, draws: int = 10) -> CheckResult:
    spec = build_hea(4, 4)
    H = build_tfim(4)
    worst = 0.0
    for _ in range(draws):
        th = rng.uniform(0, 2 * np.pi, spec.n_params)
        worst = max(worst, float(np.max(np.abs(grad_full(spec, th, H, PARAMETER_SHIFT) - grad_full(spec, th, H, central_fd(1e-5))))))
    return CheckResult("parameter shift vs central FD (HEA n=4 d=4)", worst <= 1e-6, f"max deviation {worst:.2e} over {draws} draws")


def check_termwise_oracle(rng, draws: int = 4) -> CheckResult:
    worst = 0.0
    cases = [
        (build_hea(2, 2), build_tfim(2), PARAMETER_SHIFT),
        (build_hea(3, 2), build_lfim(3), PARAMETER_SHIFT),
        (build_hva(3, 2), build_tfim(3), central_fd()),
        (build_hva(3, 2, "LFIM"), build_lfim(3), central_fd()),
    ]
    for spec, H, method in cases:
        for _ in range(draws):
            th = rng.uniform(0, 2 * np.pi, spec.n_params)
            mat = grad_termwise(spec, th, H, method)
            worst = max(worst, float(np.max(np.abs(mat.a - dense_termwise_gradient(spec, th, H)))))
    return CheckResult("termwise gradients vs dense oracle (n <= 3)", worst <= 1e-6, f"max deviation {worst:.2e}")


def check_reconstruction(rng, draws: int = 5) -> CheckResult:
    worst = 0.0
    for n in (4, 6):
        for spec, method in ((build_hea(n, 4), PARAMETER_SHIFT), (build_hva(n, 4), central_fd())):
            H = build_tfim(n)
            for _ in range(draws):
                mat = grad_termwise(spec, rng.uniform(0, 2 * np.pi, spec.n_params), H, method)
                worst = max(worst, float(mat.reconstruction_error().max()))
    return CheckResult("termwise column sums vs full gradient", worst <= 1e-8, f"max relative error {worst:.2e}")


def check_jobs_determinism(seeds: int = 3) -> CheckResult:
    from .harness import ExperimentConfig, run_grid

    cfg = ExperimentConfig(n_list=(4,), d_list=(2,), seeds=seeds)
    one, two = run_grid(cfg, jobs=1), run_grid(cfg, jobs=2)
    same = one.keys() == two.keys() and all(
        [r.records for r in one[k]] == [r.records for r in two[k]]
        and all(np.array_equal(a.g, b.g) for a, b in zip(one[k], two[k]))
        for k in one
    )
    return CheckResult("grid output independent of --jobs", same, "jobs=1 vs jobs=2 on a small grid")


def run_checks(cases: int = 10_000, seed: int = 0, log: Callable[[str], None] | None = None) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    suite = [
        lambda: check_bridge(rng, cases),
        lambda: check_scale_invariance(rng, cases),
        lambda: check_permutation_invariance(rng, cases),
        lambda: check_bound_chain(rng, cases),
        lambda: check_norm(rng, cases),
        lambda: check_inverse(rng, cases),
        lambda: check_pauli_oracle(rng, cases),
        lambda: check_ps_vs_fd(rng),
        lambda: check_termwise_oracle(rng),
        lambda: check_reconstruction(rng),
        check_jobs_determinism,
    ]
    results = []
    for fn in suite:
        res = fn()
        if log is not None:
            log(res.line())
        results.append(res)
    return results
