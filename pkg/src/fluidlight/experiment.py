"""Experiment orchestration: closed-loop runs, CSV/plot emission,
figure-set reproduction, and multi-seed replication.

CSV files are the contract; plots are a convenience rendering of the same
data.  All output is deterministic for a fixed config and seed.
"""

from __future__ import annotations

import csv
import os
import statistics
from importlib import resources

from .config import ExperimentConfig, load_config, with_overrides
from .controller import CycleObservation, SimulationPlant, run_regulation
from .oracle import FdReport
from .simulate import SamplePath

TRAJECTORY_HEADER = ["n", "theta", "L", "Lprime", "gain", "error"]
TRACE_HEADER = ["t", "x", "alpha", "beta", "event_kind"]
FD_HEADER = ["theta", "L", "ipa", "fd", "abs_err", "rel_err", "flagged"]

#: first control cycle included in tail statistics
TAIL_START = 10


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_experiment(cfg: ExperimentConfig) -> list[CycleObservation]:
    """One closed-loop regulation run as described by the config."""
    plant = SimulationPlant(
        cfg.arrival, cfg.service, cfg.light_cycles, warm_start=cfg.warm_start
    )
    return run_regulation(
        plant, cfg.controller, cfg.n_control_cycles, cfg.theta_initial, cfg.seed
    )


def tail_mean(observations, start: int = TAIL_START) -> float:
    vals = [o.L for o in observations if o.n >= start]
    if not vals:
        raise ValueError(f"no observations with n >= {start}")
    return sum(vals) / len(vals)


def write_trajectory_csv(observations, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_HEADER)
        for o in observations:
            w.writerow([o.n, _fmt(o.theta), _fmt(o.L), _fmt(o.L_prime),
                        _fmt(o.gain), _fmt(o.error)])


def write_trace_csv(path_obj: SamplePath, path) -> None:
    """Debug trace of one sample path: one row per event, with the state and
    right-limit rates at that instant."""
    starts = {round(s.t_start, 15): s for s in path_obj.segments}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_HEADER)
        for ev in path_obj.events:
            seg = starts.get(round(ev.time, 15))
            alpha = seg.alpha if seg is not None else path_obj.segments[-1].alpha
            w.writerow([_fmt(ev.time), _fmt(ev.x_at), _fmt(alpha),
                        _fmt(ev.beta_right), ev.kind])


def write_fd_report_csv(report: FdReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(FD_HEADER)
        for i in range(len(report.theta_grid)):
            w.writerow([
                _fmt(report.theta_grid[i]), _fmt(report.L_values[i]),
                _fmt(report.ipa_values[i]),
                _fmt(report.fd_values[i]), _fmt(report.abs_errors[i]),
                _fmt(report.rel_errors[i]), _fmt(bool(report.flagged[i])),
            ])


def replicate(cfg: ExperimentConfig, n_seeds: int) -> dict:
    """n_seeds independent regulation runs (seeds cfg.seed, cfg.seed+1, ...),
    aggregated into tail-mean statistics."""
    if n_seeds < 1:
        raise ValueError(f"n_seeds must be >= 1, got {n_seeds}")
    tails = []
    for i in range(n_seeds):
        obs = run_experiment(with_overrides(cfg, seed=cfg.seed + i))
        tails.append(tail_mean(obs))
    return {
        "n_seeds": n_seeds,
        "tail_means": tails,
        "mean_of_tail_means": sum(tails) / len(tails),
        "stdev_of_tail_means": statistics.stdev(tails) if n_seeds > 1 else 0.0,
    }


# --- figure-set reproduction ------------------------------------------------

BUNDLED_CONFIGS = {
    "zeta03": "reference_zeta03.cfg",
    "zeta01": "reference_zeta01.cfg",
    "theta_init01": "reference_theta_init01.cfg",
}


def load_bundled_config(name: str) -> ExperimentConfig:
    fname = BUNDLED_CONFIGS[name]
    text = resources.files("fluidlight.configs").joinpath(fname).read_text()
    from .config import parse_config_text
    return parse_config_text(text, source=f"bundled:{fname}")


def _load_figure_configs(cfg_dir=None) -> dict:
    if cfg_dir is None:
        return {name: load_bundled_config(name) for name in BUNDLED_CONFIGS}
    return {
        name: load_config(os.path.join(cfg_dir, fname))
        for name, fname in BUNDLED_CONFIGS.items()
    }


def reproduce_figures(out_dir, cfg_dir=None, plots: bool = True) -> dict:
    """Run the bundled experiment set and emit the figure CSVs, companion
    plots, and a tail-mean summary.

    Returns the per-run observation lists keyed by config name.
    """
    os.makedirs(out_dir, exist_ok=True)
    cfgs = _load_figure_configs(cfg_dir)
    runs = {name: run_experiment(c) for name, c in cfgs.items()}

    z03, z01, t01 = runs["zeta03"], runs["zeta01"], runs["theta_init01"]

    with open(os.path.join(out_dir, "fig3.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "L_zeta03", "L_zeta01"])
        for a, b in zip(z03, z01):
            w.writerow([a.n, _fmt(a.L), _fmt(b.L)])

    with open(os.path.join(out_dir, "fig4.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "L_zeta03", "L_zeta01"])
        for a, b in zip(z03, z01):
            if a.n >= TAIL_START:
                w.writerow([a.n, _fmt(a.L), _fmt(b.L)])

    with open(os.path.join(out_dir, "fig5.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "theta_init09", "theta_init01"])
        for a, b in zip(z03, t01):
            w.writerow([a.n, _fmt(a.theta), _fmt(b.theta)])

    with open(os.path.join(out_dir, "summary.txt"), "w") as fh:
        fh.write(f"tail_mean zeta=0.3: {tail_mean(z03)!r}\n")
        fh.write(f"tail_mean zeta=0.1: {tail_mean(z01)!r}\n")
        fh.write(f"tail_mean zeta=0.3 theta1=0.1: {tail_mean(t01)!r}\n")

    if plots and len(z03) > 1:
        _render_plots(out_dir, z03, z01, t01)
    return runs


def _render_plots(out_dir, z03, z01, t01) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    def line_fig(fname, series, ylabel):
        fig, ax = plt.subplots(figsize=(7, 4))
        for label, ns, ys in series:
            ax.plot(ns, ys, label=label)
        ax.set_xlabel("control cycle n")
        ax.set_ylabel(ylabel)
        ax.legend()
        fig.tight_layout()
        fig.savefig(os.path.join(out_dir, fname), dpi=120)
        plt.close(fig)

    ns = [o.n for o in z03]
    line_fig("fig3.png", [
        ("zeta=0.3", ns, [o.L for o in z03]),
        ("zeta=0.1", ns, [o.L for o in z01]),
    ], "L_n")
    tail = [o for o in z03 if o.n >= TAIL_START]
    tail01 = [o for o in z01 if o.n >= TAIL_START]
    line_fig("fig4.png", [
        ("zeta=0.3", [o.n for o in tail], [o.L for o in tail]),
        ("zeta=0.1", [o.n for o in tail01], [o.L for o in tail01]),
    ], "L_n")
    line_fig("fig5.png", [
        ("theta1=0.9", ns, [o.theta for o in z03]),
        ("theta1=0.1", [o.n for o in t01], [o.theta for o in t01]),
    ], "theta_n")
