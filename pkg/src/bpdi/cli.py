"""
Command line entry point.

    bpdi run --model tfim --out results/
    bpdi condition --n 4 --depth 4 --variant hea --seed 0
    bpdi baseline --weights equal:64 --samples 100000
    bpdi check
    bpdi report --out results/

Failures print one JSON line ``{"error": <code>, "message": ...}`` on stderr
and exit nonzero (2 for usage errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import BPDIError, BridgeViolationError, ConfigError

log = logging.getLogger("bpdi")


class UsageError(BPDIError):
    code = "usage"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _seeds(text: str) -> tuple[int, ...]:
    items = _int_list(text)
    return tuple(range(items[0])) if len(items) == 1 else items


def _add_physics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key=value config file or a previous manifest.json")
    p.add_argument("--model", type=str.upper, choices=("TFIM", "LFIM"))
    p.add_argument("--h", type=float, help="TFIM transverse field")
    p.add_argument("--hx", type=float, help="LFIM transverse field")
    p.add_argument("--hz", type=float, help="LFIM longitudinal field")
    p.add_argument("--fd-eps", type=float, dest="fd_epsilon")
    p.add_argument("--hea-entangler", choices=("ring", "line"))
    p.add_argument("--init", dest="init_distribution", choices=("uniform_0_2pi", "uniform_pm_pi"))
    p.add_argument("--global-seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bpdi", description="Termwise gradient-cancellation diagnostics on Ising models.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run the full (n, d, variant) grid")
    _add_physics(run)
    run.add_argument("--n", type=_int_list, dest="n_list", help="comma-separated qubit counts")
    run.add_argument("--depth", type=_int_list, dest="d_list", help="comma-separated depths")
    run.add_argument("--variant", type=lambda s: tuple(v.upper() for v in s.split(",")), dest="variants")
    run.add_argument("--seeds", type=_seeds, help="seed count, or comma-separated seed list")
    run.add_argument("--resamples", type=int, dest="bootstrap_resamples")
    run.add_argument("--bootstrap-seed", type=int)
    run.add_argument("--out", dest="output_dir")
    run.add_argument("--jobs", type=int)
    run.add_argument("--fd-sensitivity", action="store_true", help="also write fd_sensitivity.csv")
    run.add_argument("--dump-matrices", action="store_true", help="write every termwise matrix")

    cond = sub.add_parser("condition", help="run and print a single grid cell")
    _add_physics(cond)
    cond.add_argument("--n", type=int, required=True)
    cond.add_argument("--depth", type=int, required=True)
    cond.add_argument("--variant", type=str.upper, choices=("HEA", "HVA"), required=True)
    cond.add_argument("--seed", type=int, default=0)
    cond.add_argument("--dump", help="directory for hamiltonian/program/matrix/state dumps")

    base = sub.add_parser("baseline", help="random-sign Monte Carlo baseline")
    base.add_argument("--weights", default="equal:64", help="equal:M | list:w1,w2,.. | random:M[:SEED]")
    base.add_argument("--samples", type=int, default=100_000)
    base.add_argument("--seed", type=int, default=0)
    base.add_argument("--out", help="directory for baseline_mc.csv and baseline_curve.csv")

    chk = sub.add_parser("check", help="run the randomized invariant suite")
    chk.add_argument("--cases", type=int, default=10_000)
    chk.add_argument("--seed", type=int, default=0)

    rep = sub.add_parser("report", help="re-aggregate stored records into report files")
    rep.add_argument("--out", required=True, help="directory holding records.csv and manifest.json")
    return parser


_CONFIG_FLAGS = (
    "model",
    "h",
    "hx",
    "hz",
    "fd_epsilon",
    "hea_entangler",
    "init_distribution",
    "global_seed",
    "n_list",
    "d_list",
    "variants",
    "seeds",
    "bootstrap_resamples",
    "bootstrap_seed",
    "output_dir",
)


def _resolve_config(args):
    from .harness import ExperimentConfig, load_config_file

    data = load_config_file(args.config) if args.config else {}
    given = {k: getattr(args, k) for k in _CONFIG_FLAGS if getattr(args, k, None) is not None}
    data.update(given)
    model = data.get("model", "TFIM")
    if model == "TFIM" and ({"hx", "hz"} & given.keys()):
        raise ConfigError("--hx/--hz only apply to --model lfim")
    if model == "LFIM" and "h" in given:
        raise ConfigError("--h only applies to --model tfim; use --hx/--hz")
    jobs = getattr(args, "jobs", None)
    if jobs is None and os.environ.get("BPDI_JOBS"):
        jobs = int(os.environ["BPDI_JOBS"])
    if jobs is not None:
        data["jobs"] = jobs
    return ExperimentConfig.from_dict(data)


def cmd_run(args) -> int:
    from .harness import (
        GridTiming,
        analyze,
        dump_matrices,
        emit_reports,
        fd_sensitivity_table,
        run_grid,
        write_fd_sensitivity,
    )

    cfg = _resolve_config(args)
    timing = GridTiming()
    log.info("running %d conditions x %d seeds with %d job(s)", len(cfg.conditions()), len(cfg.seeds), cfg.jobs)
    try:
        runs = run_grid(cfg, timing=timing)
    except BridgeViolationError as exc:
        dump = getattr(exc, "dump", "")
        if dump:
            Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
            (Path(cfg.output_dir) / "bridge_violation.txt").write_text(dump)
        raise
    report = analyze(cfg, runs)
    emit_reports(report, cfg.output_dir)
    if args.dump_matrices:
        dump_matrices(runs, cfg.output_dir)
    if args.fd_sensitivity:
        cells = [(min(cfg.n_list), min(cfg.d_list)), (max(cfg.n_list), max(cfg.d_list))]
        rows = fd_sensitivity_table(cfg, cells, hea_runs=runs)
        write_fd_sensitivity(rows, Path(cfg.output_dir) / "fd_sensitivity.csv")
    log.info("grid finished in %.1f s wall, %.1f s task CPU", timing.wall_seconds, timing.task_cpu_seconds)
    _print_summary(report)
    return 0


def _print_summary(report) -> None:
    cfg = report.config
    print(f"{'n':>3} {'d':>3} {'Beff_HEA':>9} {'Beff_HVA':>9} {'dBeff':>7}  95% CI")
    for n in cfg.n_list:
        for d in cfg.d_list:
            hea = report.summaries.get((cfg.model, n, d, "HEA"))
            hva = report.summaries.get((cfg.model, n, d, "HVA"))
            b = report.bootstraps.get((cfg.model, n, d))
            fmt = lambda s: f"{s.Beff_mean:9.3f}" if s else f"{'-':>9}"
            ci = f"[{b.ci_low:.3f}, {b.ci_high:.3f}]" if b else ""
            delta = f"{b.delta_beff_mean:7.3f}" if b else f"{'-':>7}"
            print(f"{n:>3} {d:>3} {fmt(hea)} {fmt(hva)} {delta}  {ci}")


def cmd_condition(args) -> int:
    from .ansatz import build_ansatz
    from .ansatz import prepare_state
    from .harness import run_condition

    cfg = _resolve_config(args)
    rec = run_condition(cfg, cfg.model, args.n, args.depth, args.variant, args.seed)
    print("k R Neff Beff Q g valid")
    for x in rec.records:
        print(x.param_index, *(repr(float(v)) for v in (x.R, x.N_eff, x.B_eff, x.Q, x.g)), "true" if x.valid else "false")
    if args.dump:
        out = Path(args.dump)
        out.mkdir(parents=True, exist_ok=True)
        spec = build_ansatz(args.variant, args.n, args.depth, cfg.model, cfg.hea_entangler)
        (out / "hamiltonian.txt").write_text(cfg.hamiltonian(args.n).to_text())
        (out / "program.txt").write_text(spec.dump())
        (out / "matrix.txt").write_text(rec.matrix.dump())
        (out / "state.txt").write_text(prepare_state(spec, rec.theta).dump())
    return 0


def cmd_baseline(args) -> int:
    from .harness import _write_csv, BASELINE_CURVE_NEFF
    from .randsign import (
        MAX_EXHAUSTIVE,
        SQRT_2_OVER_PI,
        baseline_curve,
        exhaustive_beff_distribution,
        mc_expected_beff,
        parse_weights,
    )

    try:
        profile = parse_weights(args.weights)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    est = mc_expected_beff(profile, args.samples, args.seed)
    print(f"weights={args.weights} m={len(profile)} N_eff={profile.n_eff:.6g}")
    print(f"mean B_eff = {est.mean_beff:.6f} +- {est.std_error:.6f} ({est.n_samples} samples)")
    print(f"sqrt(2/pi) = {SQRT_2_OVER_PI:.6f}")
    exact = None
    if len(profile) <= MAX_EXHAUSTIVE:
        exact = exhaustive_beff_distribution(profile).mean
        print(f"exact E[B_eff] (enumeration) = {exact:.6f}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write_csv(
            out / "baseline_mc.csv",
            ("weights", "m", "n_eff", "n_samples", "seed", "mean_beff", "std_error", "exact_mean", "reference"),
            [(args.weights, len(profile), profile.n_eff, est.n_samples, args.seed, est.mean_beff, est.std_error, exact, est.reference)],
        )
        _write_csv(out / "baseline_curve.csv", ("n_eff", "baseline_R", "exceeds_one"), baseline_curve(BASELINE_CURVE_NEFF))
    return 0


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks(args.cases, args.seed, log=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} invariants passed")
    return 1 if failed else 0


def cmd_report(args) -> int:
    from .harness import ExperimentConfig, analyze, emit_reports, load_config_file, read_records

    out = Path(args.out)
    cfg = ExperimentConfig.from_dict(load_config_file(out / "manifest.json"))
    report = analyze(cfg, read_records(out / "records.csv"))
    emit_reports(report, out)
    _print_summary(report)
    return 0


COMMANDS = {
    "run": cmd_run,
    "condition": cmd_condition,
    "baseline": cmd_baseline,
    "check": cmd_check,
    "report": cmd_report,
}


def _fail(code: str, message: str) -> None:
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _fail(exc.code, str(exc))
        return 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        _fail(exc.code, str(exc))
        return 2
    except BPDIError as exc:
        _fail(exc.code, str(exc))
        return 1
    except OSError as exc:
        _fail("io", str(exc))
        return 1
