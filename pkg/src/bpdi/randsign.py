"""
Weighted random-sign null model for B_eff.

Given fixed magnitudes ``w`` and i.i.d. uniform signs ``s``,

    B = |sum s_i w_i| / sqrt(sum w_i**2)

whose mean approaches ``sqrt(2/pi)`` when many comparable weights participate.
Monte Carlo estimates draw from Philox streams keyed by ``(seed, replicate)``;
each replicate covers a fixed block of samples, so a result depends only on
``(profile, n_samples, seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import TooLargeError, ZeroProfileError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
SAMPLES_PER_REPLICATE = 8192
MAX_EXHAUSTIVE = 20


@dataclass(frozen=True)
class WeightProfile:
    w: tuple[float, ...]

    def __init__(self, w: Iterable[float]):
        w = tuple(float(x) for x in w)
        if not w or any(not math.isfinite(x) or x < 0 for x in w):
            raise ZeroProfileError("weights must be finite and non-negative")
        if sum(w) <= 0:
            raise ZeroProfileError("weight profile is all zero")
        object.__setattr__(self, "w", w)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.w)

    @property
    def norm(self) -> float:
        return math.sqrt(float(np.sum(self.array**2)))

    @property
    def n_eff(self) -> float:
        w = self.array
        return float(np.sum(w) ** 2 / np.sum(w * w))

    def __len__(self) -> int:
        return len(self.w)


@dataclass(frozen=True)
class BaselineEstimate:
    mean_beff: float
    std_error: float
    n_samples: int
    reference: float = SQRT_2_OVER_PI


def stream(seed: int, replicate: int = 0) -> np.random.Generator:
    """Philox generator for one ``(seed, replicate)`` pair."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, replicate])))


def _beff_of_signs(signs: np.ndarray, profile: WeightProfile) -> np.ndarray:
    return np.abs(signs @ profile.array) / profile.norm


def sample_beff(profile: WeightProfile, rng: np.random.Generator) -> float:
    signs = rng.integers(0, 2, size=len(profile)) * 2.0 - 1.0
    return float(_beff_of_signs(signs, profile))


def mc_samples(profile: WeightProfile, n_samples: int, seed: int) -> np.ndarray:
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    out = []
    for rep, start in enumerate(range(0, n_samples, SAMPLES_PER_REPLICATE)):
        size = min(SAMPLES_PER_REPLICATE, n_samples - start)
        signs = stream(seed, rep).integers(0, 2, size=(size, len(profile))) * 2.0 - 1.0
        out.append(_beff_of_signs(signs, profile))
    return np.concatenate(out)


def mc_expected_beff(profile: WeightProfile, n_samples: int, seed: int = 0) -> BaselineEstimate:
    vals = mc_samples(profile, n_samples, seed)
    se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
    return BaselineEstimate(float(np.mean(vals)), se, int(vals.size))


def baseline_rk(n_eff: float) -> float:
    """Random-sign expectation of R at a given effective term count."""
    if not n_eff > 0:
        raise ValueError(f"n_eff must be positive, got {n_eff}")
    return SQRT_2_OVER_PI / math.sqrt(n_eff)


def baseline_curve(n_eff_values: Sequence[float]) -> list[tuple[float, float, bool]]:
    """``(n_eff, baseline R, exceeds_one)``; values are not clamped to 1."""
    out = []
    for x in n_eff_values:
        r = baseline_rk(x)
        out.append((float(x), r, r > 1.0))
    return out


@dataclass(frozen=True)
class ExactDistribution:
    values: np.ndarray
    mean: float

    def support(self, decimals: int = 12) -> dict[float, float]:
        """Distinct B values (rounded) with their probabilities."""
        vals, counts = np.unique(np.round(self.values, decimals), return_counts=True)
        return {float(v): c / self.values.size for v, c in zip(vals, counts)}


def exhaustive_beff_distribution(profile: WeightProfile) -> ExactDistribution:
    """Enumerate all ``2**m`` sign patterns."""
    m = len(profile)
    if m > MAX_EXHAUSTIVE:
        raise TooLargeError(f"exhaustive enumeration is limited to {MAX_EXHAUSTIVE} weights, got {m}")
    sums = np.zeros(1)
    for w in profile.w:
        sums = np.concatenate([sums + w, sums - w])
    absums = np.abs(sums)
    return ExactDistribution(absums / profile.norm, float(np.mean(absums) / profile.norm))


def parse_weights(text: str) -> WeightProfile:
    """``equal:M``, ``list:w1,w2,...`` or ``random:M[:SEED]`` (uniform on [0, 1))."""
    kind, _, rest = text.partition(":")
    if kind == "equal":
        return WeightProfile([1.0] * int(rest))
    if kind == "list":
        return WeightProfile(float(x) for x in rest.split(","))
    if kind == "random":
        m, _, seed = rest.partition(":")
        return WeightProfile(stream(int(seed or 0)).random(int(m)))
    raise ValueError(f"unknown weight spec {text!r}; use equal:M, list:a,b,.. or random:M[:SEED]")
