"""
Cancellation diagnostics for one gradient component and their pooled statistics.

For a column ``a`` of termwise contributions to one parameter:

    R     = |sum a| / sum |a|             cancellation ratio
    N_eff = (sum |a|)**2 / sum a**2       effective term count
    B_eff = R * sqrt(N_eff)
          = |sum a| / sqrt(sum a**2)      interference quality
    Q     = sum a**2                      activity scale

and ``(sum a)**2 == B_eff**2 * Q`` holds identically.

A column with ``sum |a| == 0`` has no defined R, N_eff or B_eff. The scalar
functions return NaN for it and :func:`diagnose_column` marks the record
invalid; invalid records are left out of every pooled moment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InsufficientDataError

FORM_TOL = 1e-10
BRIDGE_RTOL = 1e-10
NONZERO_RTOL = 1e-14
DEGENERATE_VAR = 1e-30


def _col(a_col) -> np.ndarray:
    return np.asarray(a_col, dtype=float).ravel()


def cancellation_ratio(a_col) -> float:
    a = _col(a_col)
    total = np.sum(np.abs(a))
    if total == 0:
        return math.nan
    return float(abs(np.sum(a)) / total)


def effective_term_count(a_col) -> float:
    a = _col(a_col)
    q = np.sum(a * a)
    if q == 0:
        return math.nan
    return float(np.sum(np.abs(a)) ** 2 / q)


def activity_scale(a_col) -> float:
    a = _col(a_col)
    return float(np.sum(a * a))


def interference_quality(a_col) -> float:
    """``|sum a| / sqrt(sum a**2)``, asserted equal to ``R * sqrt(N_eff)``."""
    a = _col(a_col)
    q = np.sum(a * a)
    if q == 0:
        return math.nan
    b = float(abs(np.sum(a)) / math.sqrt(q))
    b_prod = cancellation_ratio(a) * math.sqrt(effective_term_count(a))
    if abs(b - b_prod) > FORM_TOL * max(1.0, b):
        raise ArithmeticError(f"B_eff forms disagree: {b!r} vs {b_prod!r}")
    return b


def count_nonzero(a_col, rtol: float = NONZERO_RTOL) -> int:
    a = np.abs(_col(a_col))
    if a.size == 0 or a.max() == 0:
        return 0
    return int(np.sum(a > rtol * a.max()))


def bridge_check(a_col) -> tuple[float, float, float]:
    """``((sum a)**2, B_eff**2 * Q, |difference|)``; the right side is 0 for an all-zero column."""
    a = _col(a_col)
    lhs = float(np.sum(a)) ** 2
    q = activity_scale(a)
    b = interference_quality(a)
    rhs = 0.0 if math.isnan(b) else b * b * q
    return lhs, rhs, abs(lhs - rhs)


def bridge_holds(a_col, rtol: float = BRIDGE_RTOL) -> bool:
    _, _, err = bridge_check(a_col)
    return err <= rtol * max(1.0, activity_scale(a_col))


@dataclass(frozen=True)
class DiagnosticsRecord:
    param_index: int
    R: float
    N_eff: float
    B_eff: float
    Q: float
    g: float
    valid: bool
    seed: int = 0


def diagnose_column(a_col, g: Optional[float] = None, param_index: int = 0, seed: int = 0) -> DiagnosticsRecord:
    """Diagnostics of one column; ``g`` defaults to the column sum."""
    a = _col(a_col)
    if g is None:
        g = float(np.sum(a))
    q = activity_scale(a)
    if np.sum(np.abs(a)) == 0:
        return DiagnosticsRecord(param_index, math.nan, math.nan, math.nan, q, float(g), False, seed)
    return DiagnosticsRecord(
        param_index,
        cancellation_ratio(a),
        effective_term_count(a),
        interference_quality(a),
        q,
        float(g),
        True,
        seed,
    )


def diagnose_matrix(a: np.ndarray, g: Optional[Sequence[float]] = None, seed: int = 0) -> list[DiagnosticsRecord]:
    a = np.asarray(a, dtype=float)
    if g is None:
        g = a.sum(axis=0)
    return [diagnose_column(a[:, k], g[k], k, seed) for k in range(a.shape[1])]


def _ordered_valid(records: Iterable[DiagnosticsRecord]) -> list[DiagnosticsRecord]:
    return sorted((r for r in records if r.valid), key=lambda r: (r.seed, r.param_index))


def pearson(x, y) -> tuple[float, bool]:
    """Pearson correlation; ``(0.0, True)`` when either input is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    vx, vy = np.mean(dx * dx), np.mean(dy * dy)
    if vx < DEGENERATE_VAR or vy < DEGENERATE_VAR:
        return 0.0, True
    r = float(np.mean(dx * dy) / math.sqrt(vx * vy))
    return min(1.0, max(-1.0, r)), False


@dataclass(frozen=True)
class FactorizationStats:
    E_B2Q: float
    E_B2: float
    E_Q: float
    ratio: float
    corr: float
    corr_degenerate: bool

    @property
    def factorized(self) -> float:
        return self.E_B2 * self.E_Q


def factorization_stats(records: Iterable[DiagnosticsRecord]) -> FactorizationStats:
    """Exact ``E[B^2 Q]`` against ``E[B^2] E[Q]`` over pooled valid records."""
    recs = _ordered_valid(records)
    if len(recs) < 2:
        raise InsufficientDataError(f"need at least 2 valid records, got {len(recs)}")
    b2 = np.array([r.B_eff**2 for r in recs])
    q = np.array([r.Q for r in recs])
    e_b2q, e_b2, e_q = float(np.mean(b2 * q)), float(np.mean(b2)), float(np.mean(q))
    denom = e_b2 * e_q
    ratio = e_b2q / denom if denom > 0 else math.nan
    corr, degenerate = pearson(b2, q)
    return FactorizationStats(e_b2q, e_b2, e_q, ratio, corr, degenerate)


def _check_seeds(per_seed_gradients) -> np.ndarray:
    g = np.asarray(per_seed_gradients, dtype=float)
    if g.ndim != 2 or g.shape[0] < 2:
        raise InsufficientDataError(f"need a (seeds >= 2, params) matrix, got shape {g.shape}")
    return g


def bias_ratios(per_seed_gradients) -> np.ndarray:
    """``|mean_s g_k| / mean_s |g_k|`` per parameter, skipping zero denominators."""
    g = _check_seeds(per_seed_gradients)
    num = np.abs(g.mean(axis=0))
    den = np.abs(g).mean(axis=0)
    keep = den > 0
    return num[keep] / den[keep]


@dataclass(frozen=True)
class BiasRatioStats:
    median: float
    mean: float
    p90: float
    count: int


def summarize_ratios(ratios) -> BiasRatioStats:
    ratios = np.asarray(ratios, dtype=float)
    if ratios.size == 0:
        raise InsufficientDataError("no parameter has a nonzero mean |gradient|")
    return BiasRatioStats(
        float(np.median(ratios)), float(np.mean(ratios)), float(np.percentile(ratios, 90)), int(ratios.size)
    )


def bias_ratio_stats(per_seed_gradients) -> BiasRatioStats:
    return summarize_ratios(bias_ratios(per_seed_gradients))


def gradient_variance(per_seed_gradients) -> float:
    """Unbiased variance across seeds per parameter, averaged over parameters."""
    g = _check_seeds(per_seed_gradients)
    return float(np.mean(np.var(g, axis=0, ddof=1)))


@dataclass(frozen=True)
class GroupSummary:
    """Pooled statistics of one ``(model, n, d, variant)`` condition."""

    model: str
    n: int
    d: int
    variant: str
    n_seeds: int
    n_records: int
    n_skipped: int
    R_mean: float
    R_std_pooled: float
    R_std_seedmeans: float
    Neff_mean: float
    Neff_std_pooled: float
    Neff_std_seedmeans: float
    Beff_mean: float
    Beff_std_pooled: float
    Beff_std_seedmeans: float
    E_B2Q: float
    E_B2: float
    E_Q: float
    factorization_ratio: float
    corr_B2_Q: float
    corr_degenerate: bool
    corr_R_invsqrtNeff: float
    grad_variance: float
    grad_second_moment: float
    bias_median: float
    bias_mean: float
    bias_p90: float
    bias_ratios: tuple[float, ...] = field(default=(), repr=False)

    @property
    def key(self) -> tuple[str, int, int, str]:
        return (self.model, self.n, self.d, self.variant)
