"""Command-line entry point: ``camsel {solve,simulate,sweep,validate}``."""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_run_config
from .errors import CamselError
from .harness import derive_seed, evaluate_strategy, override_rho, sweep_psi, sweep_rho
from .optimizer import exact_solver, ga_solve
from .scenario import expected_resolutions

SOLVE_HEADER = ["psi", "method", "selected", "fitness_class", "fitness", "expected_quality", "risk", "matches_exact"]
SIMULATE_HEADER = ["strategy", "psi", "rho_override", "trials", "mean", "sd", "over_threshold", "seed"]
TRIALS_HEADER = ["strategy", "trial", "quality"]
SWEEP_HEADER = ["axis", "axis_value", "strategy", "mean", "sd", "over_threshold"]


def fmt(x) -> str:
    """Numbers with 17 significant digits so CSV values round-trip exactly."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    path.write_text(buf.getvalue())


def _ids(indices) -> str:
    return " ".join(str(i + 1) for i in indices)


def cmd_solve(cfg: RunConfig) -> int:
    sc = cfg.scenario
    rows, table = [], {}
    for k, psi in enumerate(cfg.psi_values):
        sub = sc.replace(psi=psi)
        ga = ga_solve(sub, cfg.ga, derive_seed(cfg.seed, k))
        ex = exact_solver(sub, psi)
        same = ga.fitness == ex.fitness
        for res in (ga, ex):
            rows.append([psi, res.method, _ids(res.indices), res.fitness.kind, res.fitness.magnitude,
                         res.expected_quality, res.objective_risk, same])
        table[psi] = (ga, ex, same)
    _write_csv(cfg.out / "solve.csv", SOLVE_HEADER, rows)

    heads = "".join(f" | {'GA':>4} {'Opt':>4}" for _ in table)
    print(f"{'psi':>6}" + "".join(f" | {f'{p} of {sc.n}':>9}" for p in table))
    print(f"{'camera':>6}" + heads)
    for i in range(sc.n):
        marks = "".join(
            f" | {'x' if ga.selection[i] else '.':>4} {'x' if ex.selection[i] else '.':>4}"
            for ga, ex, _ in table.values()
        )
        print(f"{i + 1:>6}" + marks)
    for psi, (ga, ex, same) in table.items():
        print(f"psi={psi}: GA {ga.fitness}  exact {ex.fitness}  {'MATCH' if same else 'DIFFER'}")
    return 0


def cmd_simulate(cfg: RunConfig) -> int:
    sc = cfg.scenario
    if cfg.rho_override is not None:
        sc = override_rho(sc, cfg.rho_override, cfg.rho_scope)
    seeds = [derive_seed(cfg.seed, 0, s) for s in range(len(cfg.strategies))]

    def job(s):
        return evaluate_strategy(
            sc, cfg.strategies[s], cfg.quality, cfg.ga, cfg.trials, seeds[s],
            threshold=cfg.threshold, freeze_outcomes=cfg.freeze_outcomes, workers=cfg.threads,
        )

    reports = [job(s) for s in range(len(cfg.strategies))]
    rows, trial_rows = [], []
    for name, rep in zip(cfg.strategies, reports):
        rows.append([name, sc.psi, cfg.rho_override, rep.trials, rep.mean_quality, rep.sd_quality,
                     rep.over_threshold_count, rep.seed])
        trial_rows.extend([name, t, q] for t, q in enumerate(rep.per_trial))
        print(f"{name:>12}: cameras [{_ids(rep.selection)}] mean {rep.mean_quality:.6g} "
              f"sd {rep.sd_quality:.6g} over-threshold {rep.over_threshold_count}/{rep.trials}")
    _write_csv(cfg.out / "simulate.csv", SIMULATE_HEADER, rows)
    _write_csv(cfg.out / "simulate_trials.csv", TRIALS_HEADER, trial_rows)
    return 0


def cmd_sweep(cfg: RunConfig) -> int:
    if cfg.sweep_axis is None:
        raise CamselError("sweep needs an axis (--axis or [sweep].axis)")
    if not cfg.sweep_values:
        raise CamselError("sweep needs a non-empty list of values (--values or [sweep].values)")
    kw = dict(threshold=cfg.threshold, freeze_outcomes=cfg.freeze_outcomes, workers=cfg.threads)
    if cfg.sweep_axis == "psi":
        result = sweep_psi(cfg.scenario, [int(v) for v in cfg.sweep_values], cfg.strategies,
                           cfg.quality, cfg.ga, cfg.trials, cfg.seed, **kw)
    else:
        result = sweep_rho(cfg.scenario, [float(v) for v in cfg.sweep_values], cfg.strategies,
                           cfg.quality, cfg.ga, cfg.trials, cfg.seed, scope=cfg.rho_scope, **kw)
    rows = []
    for p in result.points:
        value = int(p.value) if result.axis == "psi" else float(p.value)
        r = p.report
        rows.append([result.axis, value, p.strategy, r.mean_quality, r.sd_quality, r.over_threshold_count])
        print(f"{result.axis}={value:>5g} {p.strategy:>12}: mean {r.mean_quality:.6g} "
              f"sd {r.sd_quality:.6g} over {r.over_threshold_count}/{r.trials}")
    _write_csv(cfg.out / "sweep.csv", SWEEP_HEADER, rows)
    return 0


def validate_report(cfg: RunConfig) -> tuple[list[str], int]:
    """Diagnostics lines and exit status for a loaded config."""
    sc = cfg.scenario
    lines, status = [], 0
    lines.append(f"scenario {sc.name or '?'}: N={sc.n} theta={fmt(sc.theta)} psi={sc.psi} "
                 f"trials={sc.trials} seed={sc.master_seed}")
    _, delta = sc.rho.repaired()
    min_eig = sc.rho.min_eigenvalue()
    if delta > 0:
        lines.append(f"WARNING correlation matrix not PSD (min eigenvalue {min_eig:.3g}); "
                     f"copula uses repaired matrix, max entry change {delta:.3g}")
    else:
        lines.append(f"correlation matrix PSD (min eigenvalue {min_eig:.6g}); repair delta 0")
    means = expected_resolutions(sc)
    for cam, m in zip(sc.cameras, means):
        mo = cam.moments
        lines.append(f"camera {cam.id + 1}: {cam.width}x{cam.height} R={cam.resolution} "
                     f"Beta({fmt(cam.beta_a)},{fmt(cam.beta_b)}) E[p]={mo.mean:.6f} sd[p]={mo.std:.6f} "
                     f"E[R]={fmt(m)}")
    # the best <= psi subset for expected quality is the psi largest E[R]
    order = sorted(range(sc.n), key=lambda i: (-means[i], i))
    best = 0.0
    needed = None
    for k, i in enumerate(order[: sc.psi], 1):
        best += means[i]
        if needed is None and best >= sc.theta:
            needed = order[:k]
    if needed is not None:
        q = float(sum(means[i] for i in needed))
        lines.append(f"theta attainable: true; smallest subset [{_ids(sorted(needed))}] "
                     f"expected quality {fmt(q)} >= theta {fmt(sc.theta)}")
    else:
        lines.append(f"theta attainable: false; best expected quality with psi={sc.psi} is "
                     f"{fmt(best)} < theta {fmt(sc.theta)}")
        status = 1
    if cfg.quality.variant != "resolution_sum":
        lines.append(f"quality model {cfg.quality.variant}, threshold {fmt(cfg.threshold)} vertices")
    return lines, status


def cmd_validate(cfg: RunConfig) -> int:
    lines, status = validate_report(cfg)
    print("\n".join(lines))
    print("OK" if status == 0 else "FAILED")
    return status


def _comma_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="camsel", description="Portfolio-theoretic camera selection.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario/run TOML (default: shipped dance1-7cam)")
    common.add_argument("--seed", type=int, help="master seed (overrides scenario.master_seed)")
    common.add_argument("--out", type=Path, help="output directory (default: ./out)")
    common.add_argument("--threads", type=int, help="worker threads for trials and sweep points")
    common.add_argument("--trials", type=int)
    common.add_argument("--strategies", type=_comma_list, help="comma list of portfolio,traditional,all")
    common.add_argument("--threshold", type=float, help="over-threshold level in the quality model's unit")
    common.add_argument("--freeze-outcomes", action="store_true", default=None,
                        help="camera up iff its sampled p >= 0.5 instead of a Bernoulli draw")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="GA vs exhaustive selection per budget")
    p.add_argument("--psi", type=lambda s: [int(v) for v in _comma_list(s)], dest="psi_values",
                   help="comma list of budgets")
    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo metrics per strategy")
    p.add_argument("--psi", type=int)
    p.add_argument("--rho-override", type=float)
    p.add_argument("--rho-scope", choices=["high_res", "all"])
    p = sub.add_parser("sweep", parents=[common], help="metrics over a psi or rho grid")
    p.add_argument("--axis", choices=["psi", "rho"])
    p.add_argument("--values", type=lambda s: [float(v) for v in _comma_list(s)])
    p.add_argument("--psi", type=int)
    p.add_argument("--rho-scope", choices=["high_res", "all"])
    sub.add_parser("validate", parents=[common], help="check a config and report diagnostics")
    return parser


COMMANDS = {"solve": cmd_solve, "simulate": cmd_simulate, "sweep": cmd_sweep, "validate": cmd_validate}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    if args.command == "sweep" and overrides.get("values") == []:
        print("camsel: error: --values is empty", file=sys.stderr)
        return 2
    try:
        cfg = load_run_config(args.config, overrides)
        return COMMANDS[args.command](cfg)
    except CamselError as exc:
        print(f"camsel: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
