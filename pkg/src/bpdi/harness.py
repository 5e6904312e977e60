"""
Experiment grid: runs, pooling, seed-level bootstrap and report files.

Every run is a pure function of ``(config, model, n, d, variant, seed)``. The
initial angles come from a Philox stream keyed by
``(global_seed, model, n, d, variant, seed)``, so the grid output does not
depend on how many worker processes execute it.
"""

from __future__ import annotations

import csv
import dataclasses
import heapq
import json
import logging
import math
import os
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .ansatz import ENTANGLERS, MODELS, VARIANTS, build_ansatz
from .diagnostics import (
    DiagnosticsRecord,
    GroupSummary,
    bias_ratios,
    bridge_holds,
    diagnose_matrix,
    factorization_stats,
    gradient_variance,
    pearson,
    summarize_ratios,
)
from .errors import BridgeViolationError, ConfigError, InsufficientDataError
from .gradients import TermwiseGradientMatrix, default_method, grad_termwise
from .hamiltonian import DEFAULT_H, DEFAULT_HX, DEFAULT_HZ, Hamiltonian, build_lfim, build_tfim
from .randsign import baseline_curve, baseline_rk

log = logging.getLogger(__name__)

INIT_DISTRIBUTIONS = ("uniform_0_2pi", "uniform_pm_pi")
_MODEL_CODE = {"TFIM": 0, "LFIM": 1}
_VARIANT_CODE = {"HEA": 0, "HVA": 1}

BASELINE_CURVE_NEFF = tuple(0.5 + 0.25 * i for i in range(79))


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "TFIM"
    n_list: tuple[int, ...] = (4, 6, 8, 10)
    d_list: tuple[int, ...] = (4, 6, 8)
    variants: tuple[str, ...] = VARIANTS
    h: float = DEFAULT_H
    hx: float = DEFAULT_HX
    hz: float = DEFAULT_HZ
    seeds: tuple[int, ...] = tuple(range(50))
    init_distribution: str = "uniform_0_2pi"
    fd_epsilon: float = 1e-5
    hea_entangler: str = "ring"
    bootstrap_resamples: int = 2000
    bootstrap_seed: int = 0
    global_seed: int = 0
    output_dir: str = "results"
    jobs: int = 1

    def __post_init__(self):
        if isinstance(self.seeds, int):
            object.__setattr__(self, "seeds", tuple(range(self.seeds)))
        for name in ("n_list", "d_list", "variants", "seeds"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if not self.n_list or any(n < 2 for n in self.n_list):
            raise ConfigError(f"every n must be >= 2, got {self.n_list}")
        if not self.d_list or any(d < 1 for d in self.d_list):
            raise ConfigError(f"every depth must be >= 1, got {self.d_list}")
        if not self.variants or any(v not in VARIANTS for v in self.variants):
            raise ConfigError(f"variants must be drawn from {VARIANTS}, got {self.variants}")
        if len(set(self.seeds)) < 2 or any(s < 0 for s in self.seeds):
            raise ConfigError("need at least 2 distinct non-negative seeds")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.init_distribution not in INIT_DISTRIBUTIONS:
            raise ConfigError(f"init_distribution must be one of {INIT_DISTRIBUTIONS}")
        if self.hea_entangler not in ENTANGLERS:
            raise ConfigError(f"hea_entangler must be one of {ENTANGLERS}")
        if not self.fd_epsilon > 0:
            raise ConfigError("fd_epsilon must be positive")
        if self.bootstrap_resamples < 1 or self.jobs < 1:
            raise ConfigError("bootstrap_resamples and jobs must be positive")

    def hamiltonian(self, n: int) -> Hamiltonian:
        return build_tfim(n, self.h) if self.model == "TFIM" else build_lfim(n, self.hx, self.hz)

    def conditions(self) -> list[tuple[int, int, str]]:
        return [(n, d, v) for n in self.n_list for d in self.d_list for v in self.variants]

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


_LIST_KEYS = {"n_list": int, "d_list": int, "variants": str, "seeds": int}
_SCALAR_KEYS = {
    "model": str,
    "h": float,
    "hx": float,
    "hz": float,
    "init_distribution": str,
    "fd_epsilon": float,
    "hea_entangler": str,
    "bootstrap_resamples": int,
    "bootstrap_seed": int,
    "global_seed": int,
    "output_dir": str,
    "jobs": int,
}


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; lists are comma-separated; ``seeds`` may be a count."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _LIST_KEYS:
            items = [s.strip() for s in value.split(",") if s.strip()]
            if key == "seeds" and len(items) == 1:
                out[key] = tuple(range(int(items[0])))
            else:
                out[key] = tuple(_LIST_KEYS[key](s.upper() if key == "variants" else s) for s in items)
        elif key in _SCALAR_KEYS:
            out[key] = _SCALAR_KEYS[key](value.upper() if key == "model" else value)
        else:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
    return out


def load_config_file(path: str | os.PathLike) -> dict:
    """Read either a flat key=value file or a ``manifest.json`` written by a previous run."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return dict(data.get("config", data))
    return parse_config_text(text)


# --- single runs --------------------------------------------------------------------


@dataclass
class RunRecord:
    model: str
    n: int
    d: int
    variant: str
    seed: int
    g: np.ndarray
    records: list[DiagnosticsRecord]
    theta: Optional[np.ndarray] = None
    matrix: Optional[TermwiseGradientMatrix] = field(default=None, repr=False)

    @property
    def key(self) -> tuple[str, int, int, str]:
        return (self.model, self.n, self.d, self.variant)


def draw_theta(config: ExperimentConfig, model: str, n: int, d: int, variant: str, seed: int, size: int) -> np.ndarray:
    ss = np.random.SeedSequence([config.global_seed, _MODEL_CODE[model], n, d, _VARIANT_CODE[variant], seed])
    rng = np.random.Generator(np.random.Philox(ss))
    if config.init_distribution == "uniform_0_2pi":
        return rng.uniform(0.0, 2 * math.pi, size)
    return rng.uniform(-math.pi, math.pi, size)


def run_condition(
    config: ExperimentConfig,
    model: str,
    n: int,
    d: int,
    variant: str,
    seed: int,
    fd_epsilon: Optional[float] = None,
) -> RunRecord:
    """One seeded run: angles, termwise gradients and per-parameter diagnostics.

    Raises :class:`BridgeViolationError` (with the matrix dump attached as
    ``.dump``) if any column breaks the bridge identity or the reconstruction
    check.
    """
    H = build_tfim(n, config.h) if model == "TFIM" else build_lfim(n, config.hx, config.hz)
    spec = build_ansatz(variant, n, d, model=model, entangler=config.hea_entangler)
    theta = draw_theta(config, model, n, d, variant, seed, spec.n_params)
    method = default_method(spec, config.fd_epsilon if fd_epsilon is None else fd_epsilon)
    mat = grad_termwise(spec, theta, H, method)
    try:
        mat.check_reconstruction()
        for k in range(spec.n_params):
            if not bridge_holds(mat.a[:, k]):
                raise BridgeViolationError(f"bridge identity violated in column {k}")
    except BridgeViolationError as exc:
        exc.dump = f"# {model} n={n} d={d} {variant} seed={seed}\n" + mat.dump()
        raise
    records = diagnose_matrix(mat.a, mat.g, seed=seed)
    return RunRecord(model, n, d, variant, seed, mat.g, records, theta, mat)


def _task(args) -> tuple[RunRecord, float]:
    config, model, n, d, variant, seed, eps = args
    t0 = time.process_time()
    rec = run_condition(config, model, n, d, variant, seed, eps)
    return rec, time.process_time() - t0


GridRuns = dict[tuple[str, int, int, str], list[RunRecord]]


@dataclass
class GridTiming:
    wall_seconds: float = 0.0
    task_cpu_seconds: float = 0.0
    task_times: list[float] = field(default_factory=list)

    def makespan(self, workers: int) -> float:
        """Longest-task-first schedule length of the measured task times on ``workers`` processes."""
        loads = [0.0] * workers
        for t in sorted(self.task_times, reverse=True):
            heapq.heapreplace(loads, loads[0] + t)
        return max(loads)


def run_grid(
    config: ExperimentConfig,
    conditions: Optional[Sequence[tuple[int, int, str]]] = None,
    jobs: Optional[int] = None,
    fd_epsilon: Optional[float] = None,
    timing: Optional[GridTiming] = None,
) -> GridRuns:
    """Run every (condition, seed) task; results are grouped and ordered by seed."""
    conditions = config.conditions() if conditions is None else list(conditions)
    jobs = config.jobs if jobs is None else jobs
    tasks = [(config, config.model, n, d, v, s, fd_epsilon) for n, d, v in conditions for s in config.seeds]
    # largest tasks first keeps the pool busy; the output order is restored below
    order = sorted(range(len(tasks)), key=lambda i: -(tasks[i][2] * tasks[i][3] * (1 << tasks[i][2])))
    log.debug("%d tasks on %d job(s)", len(tasks), jobs)
    t0 = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(_task, [tasks[i] for i in order], chunksize=1))
    else:
        done = [_task(tasks[i]) for i in order]
    results: list = [None] * len(tasks)
    for i, item in zip(order, done):
        results[i] = item
    if timing is not None:
        timing.wall_seconds += time.perf_counter() - t0
        timing.task_cpu_seconds += sum(cpu for _, cpu in results)
        timing.task_times.extend(cpu for _, cpu in results)
    runs: GridRuns = {}
    for rec, _ in results:
        runs.setdefault(rec.key, []).append(rec)
    for key in runs:
        runs[key].sort(key=lambda r: r.seed)
    return runs


# --- pooling ------------------------------------------------------------------------


def _mean_std(x: Sequence[float]) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(np.mean(x)), float(np.std(x, ddof=1)) if x.size > 1 else 0.0


def aggregate(runs: Iterable[RunRecord]) -> GroupSummary:
    """Pool the parameter-level diagnostics of one condition across seeds."""
    runs = sorted(runs, key=lambda r: r.seed)
    if len({r.seed for r in runs}) < 2:
        raise InsufficientDataError("aggregation needs at least 2 seeds")
    if len({r.seed for r in runs}) != len(runs):
        raise ValueError("duplicate seeds in one condition")
    if len({r.key for r in runs}) != 1:
        raise ValueError("runs from different conditions cannot be pooled")
    model, n, d, variant = runs[0].key
    pooled = [rec for r in runs for rec in sorted(r.records, key=lambda x: x.param_index) if rec.valid]
    skipped = sum(1 for r in runs for rec in r.records if not rec.valid)
    if len(pooled) < 2:
        raise InsufficientDataError("fewer than 2 valid parameter records")

    stats = {}
    for name, attr in (("R", "R"), ("Neff", "N_eff"), ("Beff", "B_eff")):
        mean, std = _mean_std([getattr(rec, attr) for rec in pooled])
        seed_means = [np.mean([getattr(x, attr) for x in r.records if x.valid]) for r in runs if any(x.valid for x in r.records)]
        stats[name] = (mean, std, _mean_std(seed_means)[1])

    fact = factorization_stats(pooled)
    corr_rn, _ = pearson([rec.R for rec in pooled], [1 / math.sqrt(rec.N_eff) for rec in pooled])
    G = np.array([r.g for r in runs])
    ratios = bias_ratios(G)
    bias = summarize_ratios(ratios)
    return GroupSummary(
        model=model,
        n=n,
        d=d,
        variant=variant,
        n_seeds=len(runs),
        n_records=len(pooled),
        n_skipped=skipped,
        R_mean=stats["R"][0],
        R_std_pooled=stats["R"][1],
        R_std_seedmeans=stats["R"][2],
        Neff_mean=stats["Neff"][0],
        Neff_std_pooled=stats["Neff"][1],
        Neff_std_seedmeans=stats["Neff"][2],
        Beff_mean=stats["Beff"][0],
        Beff_std_pooled=stats["Beff"][1],
        Beff_std_seedmeans=stats["Beff"][2],
        E_B2Q=fact.E_B2Q,
        E_B2=fact.E_B2,
        E_Q=fact.E_Q,
        factorization_ratio=fact.ratio,
        corr_B2_Q=fact.corr,
        corr_degenerate=fact.corr_degenerate,
        corr_R_invsqrtNeff=corr_rn,
        grad_variance=gradient_variance(G),
        grad_second_moment=float(np.mean(G * G)),
        bias_median=bias.median,
        bias_mean=bias.mean,
        bias_p90=bias.p90,
        bias_ratios=tuple(float(x) for x in ratios),
    )


@dataclass(frozen=True)
class BootstrapResult:
    delta_beff_mean: float
    ci_low: float
    ci_high: float
    n_resamples: int
    excludes_zero: bool


def _run_sums(runs: Sequence[RunRecord]) -> tuple[np.ndarray, np.ndarray]:
    sums = np.array([math.fsum(x.B_eff for x in r.records if x.valid) for r in runs])
    counts = np.array([sum(1 for x in r.records if x.valid) for r in runs], dtype=float)
    return sums, counts


def bootstrap_delta_beff(
    hea_runs: Sequence[RunRecord], hva_runs: Sequence[RunRecord], n_resamples: int = 2000, seed: int = 0
) -> BootstrapResult:
    """Seed-level cluster bootstrap of ``pooled mean B_eff (HVA) - pooled mean B_eff (HEA)``.

    Whole runs are resampled with replacement on each side independently;
    the interval is the 2.5/97.5 percentile pair of the resampled differences.
    """
    if not hea_runs or not hva_runs:
        raise InsufficientDataError("bootstrap needs runs on both sides")
    hea_runs = sorted(hea_runs, key=lambda r: r.seed)
    hva_runs = sorted(hva_runs, key=lambda r: r.seed)
    s_hea, c_hea = _run_sums(hea_runs)
    s_hva, c_hva = _run_sums(hva_runs)
    if c_hea.sum() == 0 or c_hva.sum() == 0:
        raise InsufficientDataError("no valid records on one side")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
    i_hea = rng.integers(0, len(hea_runs), size=(n_resamples, len(hea_runs)))
    i_hva = rng.integers(0, len(hva_runs), size=(n_resamples, len(hva_runs)))
    with np.errstate(invalid="ignore", divide="ignore"):
        diffs = s_hva[i_hva].sum(1) / c_hva[i_hva].sum(1) - s_hea[i_hea].sum(1) / c_hea[i_hea].sum(1)
    diffs = diffs[np.isfinite(diffs)]
    delta = float(s_hva.sum() / c_hva.sum() - s_hea.sum() / c_hea.sum())
    lo, hi = (float(x) for x in np.percentile(diffs, [2.5, 97.5]))
    return BootstrapResult(delta, lo, hi, int(n_resamples), bool(lo > 0 or hi < 0))


# --- whole-grid analysis ------------------------------------------------------------


@dataclass
class GridReport:
    config: ExperimentConfig
    runs: GridRuns
    summaries: dict[tuple[str, int, int, str], GroupSummary]
    bootstraps: dict[tuple[str, int, int], BootstrapResult]
    pooled_bias: Optional[object] = None


def analyze(config: ExperimentConfig, runs: GridRuns) -> GridReport:
    summaries = {key: aggregate(group) for key, group in sorted(runs.items())}
    bootstraps = {}
    for n in config.n_list:
        for d in config.d_list:
            hea = runs.get((config.model, n, d, "HEA"))
            hva = runs.get((config.model, n, d, "HVA"))
            if hea and hva:
                bseed = int(np.random.SeedSequence([config.bootstrap_seed, _MODEL_CODE[config.model], n, d]).generate_state(1)[0])
                bootstraps[(config.model, n, d)] = bootstrap_delta_beff(hea, hva, config.bootstrap_resamples, bseed)
    all_ratios = [x for s in summaries.values() for x in s.bias_ratios]
    pooled_bias = summarize_ratios(all_ratios) if all_ratios else None
    return GridReport(config, runs, summaries, bootstraps, pooled_bias)


def fd_sensitivity_table(
    config: ExperimentConfig,
    cells: Sequence[tuple[int, int]],
    eps_list: Sequence[float] = (1e-4, 1e-5, 1e-6),
    hea_runs: Optional[GridRuns] = None,
) -> list[dict]:
    """Pooled N_eff / B_eff of HEA (shift rule) and HVA (central differences at each step)."""
    rows = []
    for n, d in cells:
        key = (config.model, n, d, "HEA")
        hea = (hea_runs or {}).get(key) or run_grid(config, [(n, d, "HEA")])[key]
        s_hea = aggregate(hea)
        for eps in eps_list:
            hva = run_grid(config, [(n, d, "HVA")], fd_epsilon=eps)[(config.model, n, d, "HVA")]
            s_hva = aggregate(hva)
            rows.append(
                dict(
                    model=config.model,
                    n=n,
                    d=d,
                    eps=eps,
                    Neff_hea=s_hea.Neff_mean,
                    Neff_hva=s_hva.Neff_mean,
                    Beff_hea=s_hea.Beff_mean,
                    Beff_hva=s_hva.Beff_mean,
                    Neff_hva_gt_hea=s_hva.Neff_mean > s_hea.Neff_mean,
                    Beff_hva_gt_hea=s_hva.Beff_mean > s_hea.Beff_mean,
                )
            )
    return rows


# --- report files -------------------------------------------------------------------


def fmt(x) -> str:
    """Shortest round-trip text for floats; ``true``/``false`` for booleans."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if x is None:
        return ""
    return str(x)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


RECORD_COLUMNS = ("n", "d", "variant", "model", "seed", "k", "R", "Neff", "Beff", "Q", "g", "valid")


def write_records(path: Path, runs: GridRuns) -> None:
    rows = []
    for key in sorted(runs):
        for r in runs[key]:
            for x in r.records:
                rows.append((r.n, r.d, r.variant, r.model, r.seed, x.param_index, x.R, x.N_eff, x.B_eff, x.Q, x.g, x.valid))
    _write_csv(path, RECORD_COLUMNS, rows)


def read_records(path: str | os.PathLike) -> GridRuns:
    grouped: dict[tuple, list[DiagnosticsRecord]] = {}
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            key = (row["model"], int(row["n"]), int(row["d"]), row["variant"], int(row["seed"]))
            seed = int(row["seed"])
            grouped.setdefault(key, []).append(
                DiagnosticsRecord(
                    int(row["k"]),
                    float(row["R"]),
                    float(row["Neff"]),
                    float(row["Beff"]),
                    float(row["Q"]),
                    float(row["g"]),
                    row["valid"] == "true",
                    seed,
                )
            )
    runs: GridRuns = {}
    for (model, n, d, variant, seed), recs in sorted(grouped.items()):
        recs.sort(key=lambda x: x.param_index)
        g = np.array([x.g for x in recs])
        runs.setdefault((model, n, d, variant), []).append(RunRecord(model, n, d, variant, seed, g, recs))
    return runs


def _code_version() -> str:
    try:
        rev = subprocess.run(
            ["git", "rev-parse", "--short", "HEAD"],
            cwd=Path(__file__).parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if rev.returncode == 0 and rev.stdout.strip():
            return f"{__version__}+g{rev.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def emit_reports(report: GridReport, out_dir: str | os.PathLike, write_record_file: bool = True) -> list[Path]:
    """Write the CSV/JSON outputs; returns the written paths."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    cfg, summ = report.config, report.summaries
    written = []

    def path(name: str) -> Path:
        written.append(out / name)
        return out / name

    rows = []
    for n in cfg.n_list:
        for d in cfg.d_list:
            hea = summ.get((cfg.model, n, d, "HEA"))
            hva = summ.get((cfg.model, n, d, "HVA"))
            delta = hva.Beff_mean - hea.Beff_mean if hea and hva else None
            rows.append(
                (
                    n,
                    d,
                    hea and hea.R_mean,
                    hva and hva.R_mean,
                    hea and hea.Neff_mean,
                    hva and hva.Neff_mean,
                    hea and hea.Beff_mean,
                    hva and hva.Beff_mean,
                    delta,
                )
            )
    _write_csv(
        path("summary.csv"),
        ("n", "d", "R_hea", "R_hva", "Neff_hea", "Neff_hva", "Beff_hea", "Beff_hva", "delta_Beff"),
        rows,
    )

    _write_csv(
        path("variance_scaling.csv"),
        ("model", "n", "d", "variant", "grad_variance", "grad_second_moment", "n_seeds"),
        ((s.model, s.n, s.d, s.variant, s.grad_variance, s.grad_second_moment, s.n_seeds) for s in summ.values()),
    )

    curve_rows = []
    for key in sorted(report.runs):
        for r in report.runs[key]:
            for x in r.records:
                if x.valid:
                    base = baseline_rk(x.N_eff)
                    curve_rows.append(("point", r.model, r.n, r.d, r.variant, r.seed, x.param_index, x.N_eff, 1 / math.sqrt(x.N_eff), x.R, base, base > 1.0))
    for neff, base, exceeds in baseline_curve(BASELINE_CURVE_NEFF):
        curve_rows.append(("baseline", None, None, None, None, None, None, neff, 1 / math.sqrt(neff), None, base, exceeds))
    _write_csv(
        path("rk_vs_neff.csv"),
        ("kind", "model", "n", "d", "variant", "seed", "k", "Neff", "inv_sqrt_Neff", "R", "baseline_R", "exceeds_one"),
        curve_rows,
    )

    _write_csv(
        path("variance_bridge.csv"),
        ("model", "n", "d", "variant", "E_B2Q", "E_B2", "E_Q", "factorized", "factorization_ratio", "corr_B2_Q", "corr_degenerate", "grad_second_moment", "grad_variance"),
        (
            (s.model, s.n, s.d, s.variant, s.E_B2Q, s.E_B2, s.E_Q, s.E_B2 * s.E_Q, s.factorization_ratio, s.corr_B2_Q, s.corr_degenerate, s.grad_second_moment, s.grad_variance)
            for s in summ.values()
        ),
    )

    _write_csv(
        path("bootstrap.csv"),
        ("model", "n", "d", "delta_Beff", "ci_low", "ci_high", "n_resamples", "excludes_zero"),
        ((m, n, d, b.delta_beff_mean, b.ci_low, b.ci_high, b.n_resamples, b.excludes_zero) for (m, n, d), b in report.bootstraps.items()),
    )

    group_fields = [f.name for f in dataclasses.fields(GroupSummary) if f.name != "bias_ratios"]
    _write_csv(path("groups.csv"), group_fields, ([getattr(s, f) for f in group_fields] for s in summ.values()))

    bias_rows = [(s.model, s.n, s.d, s.variant, s.bias_median, s.bias_mean, s.bias_p90, len(s.bias_ratios)) for s in summ.values()]
    if report.pooled_bias is not None:
        pb = report.pooled_bias
        bias_rows.append(("pooled", None, None, None, pb.median, pb.mean, pb.p90, pb.count))
    _write_csv(path("bias_ratio.csv"), ("model", "n", "d", "variant", "median", "mean", "p90", "count"), bias_rows)

    if write_record_file:
        write_records(path("records.csv"), report.runs)

    manifest = {"config": cfg.to_dict(), "code_version": _code_version(), "files": sorted(p.name for p in written)}
    with open(path("manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return written


def write_fd_sensitivity(rows: list[dict], path: str | os.PathLike) -> None:
    header = list(rows[0]) if rows else ["model", "n", "d", "eps"]
    _write_csv(Path(path), header, ([r[h] for h in header] for r in rows))


def dump_matrices(runs: GridRuns, out_dir: str | os.PathLike) -> None:
    mdir = Path(out_dir) / "matrices"
    mdir.mkdir(parents=True, exist_ok=True)
    for key in sorted(runs):
        for r in runs[key]:
            if r.matrix is not None:
                (mdir / f"{r.model}_n{r.n}_d{r.d}_{r.variant}_s{r.seed}.txt").write_text(r.matrix.dump())
