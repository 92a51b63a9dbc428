"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .config import ConfigError, load_config, with_overrides
from .experiment import (
    replicate,
    reproduce_figures,
    run_experiment,
    tail_mean,
    write_fd_report_csv,
    write_trace_csv,
    write_trajectory_csv,
)
from .ipa import ipa_derivative
from .oracle import fd_report
from .rates import generate_arrival
from .simulate import performance, simulate_control_cycle


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fluidlight",
        description="Fluid-queue traffic-light simulator with sample-path "
                    "derivative estimation and set-point regulation.",
    )
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seed", type=int, default=None,
                   help="override the config seed")
    p.add_argument("--quiet", action="store_true", help="suppress stdout chatter")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="one open-loop control cycle")
    s.add_argument("--config", required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--trace", default=None, metavar="OUT.CSV")

    r = sub.add_parser("regulate", help="closed-loop regulation run")
    r.add_argument("--config", required=True)
    r.add_argument("--out", default=".", help="output directory")

    v = sub.add_parser("validate-ipa",
                       help="derivative estimator vs finite differences")
    v.add_argument("--config", required=True)
    v.add_argument("--grid", required=True, metavar="A:B:STEPS")
    v.add_argument("--out", default="fd_report.csv")
    v.add_argument("--h", type=float, default=1e-6)

    f = sub.add_parser("reproduce-figures", help="run the bundled experiment set")
    f.add_argument("--out", default="figures")
    f.add_argument("--config-dir", default=None)
    f.add_argument("--no-plots", action="store_true")

    m = sub.add_parser("replicate", help="aggregate over independent seeds")
    m.add_argument("--config", required=True)
    m.add_argument("--seeds", type=int, required=True)
    m.add_argument("--out", default=None, metavar="OUT.CSV")

    return p


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = with_overrides(cfg, seed=args.seed)
    return cfg


def _cmd_simulate(args) -> int:
    cfg = _load(args)
    if not 0.0 <= args.theta <= cfg.cycle_length:
        print(f"error: theta must lie in [0, {cfg.cycle_length}]", file=sys.stderr)
        return 2
    arrival = generate_arrival(cfg.arrival, cfg.control_horizon, cfg.seed)
    path = simulate_control_cycle(
        args.theta, arrival, cfg.service, cfg.light_cycles, 0.0
    )
    L = performance(path)
    Lp = ipa_derivative(path).L_prime
    print(f"L = {L!r}")
    print(f"Lprime = {Lp!r}")
    if args.trace:
        write_trace_csv(path, args.trace)
        if not args.quiet:
            print(f"trace written to {args.trace}")
    return 0


def _cmd_regulate(args) -> int:
    cfg = _load(args)
    obs = run_experiment(cfg)
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "trajectory.csv")
    write_trajectory_csv(obs, out_path)
    if not args.quiet:
        print(f"trajectory written to {out_path}")
        print(f"tail mean L (n>=10): {tail_mean(obs)!r}")
    return 0


def _cmd_validate_ipa(args) -> int:
    cfg = _load(args)
    try:
        a, b, steps = args.grid.split(":")
        a, b, steps = float(a), float(b), int(steps)
        if steps < 1 or not 0.0 <= a <= b <= cfg.cycle_length:
            raise ValueError
    except ValueError:
        print(f"error: bad --grid {args.grid!r}, expected A:B:STEPS",
              file=sys.stderr)
        return 2
    grid = np.linspace(a, b, steps)
    arrival = generate_arrival(cfg.arrival, cfg.control_horizon, cfg.seed)
    report = fd_report(grid, arrival, cfg.service, cfg.light_cycles, h=args.h)
    write_fd_report_csv(report, args.out)
    worst = report.worst_unflagged_rel_error()
    n_flagged = sum(report.flagged)
    if not args.quiet:
        print(f"report written to {args.out}")
        print(f"flagged points: {n_flagged}/{len(report.theta_grid)}")
        print(f"worst unflagged relative error: {worst!r}")
    if worst > 0.01:
        print("error: unflagged relative error above 1%", file=sys.stderr)
        return 1
    return 0


def _cmd_reproduce_figures(args) -> int:
    runs = reproduce_figures(args.out, cfg_dir=args.config_dir,
                             plots=not args.no_plots)
    if not args.quiet:
        print(f"figure data written to {args.out}")
        for name, obs in runs.items():
            print(f"{name}: tail mean L = {tail_mean(obs)!r}")
    return 0


def _cmd_replicate(args) -> int:
    cfg = _load(args)
    if args.seeds < 1:
        print("error: --seeds must be >= 1", file=sys.stderr)
        return 2
    stats = replicate(cfg, args.seeds)
    if args.out:
        import csv as _csv
        with open(args.out, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["seed", "tail_mean"])
            for i, tm in enumerate(stats["tail_means"]):
                w.writerow([cfg.seed + i, repr(tm)])
    if not args.quiet:
        print(f"seeds: {stats['n_seeds']}")
        print(f"mean of tail means: {stats['mean_of_tail_means']!r}")
        print(f"stdev of tail means: {stats['stdev_of_tail_means']!r}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "regulate": _cmd_regulate,
    "validate-ipa": _cmd_validate_ipa,
    "reproduce-figures": _cmd_reproduce_figures,
    "replicate": _cmd_replicate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
