import csv
import os

import pytest

from fluidlight import cli
from fluidlight.config import parse_config_text
from fluidlight.experiment import (
    BUNDLED_CONFIGS,
    FD_HEADER,
    TRACE_HEADER,
    TRAJECTORY_HEADER,
    load_bundled_config,
    replicate,
    reproduce_figures,
    run_experiment,
    tail_mean,
    write_trace_csv,
    write_trajectory_csv,
)
from tests.conftest import FAST_CFG


@pytest.fixture(scope="module")
def fast_cfg():
    return parse_config_text(FAST_CFG)


@pytest.fixture(scope="module")
def fast_run(fast_cfg):
    return run_experiment(fast_cfg)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestExperiment:
    def test_run_length_and_numbering(self, fast_cfg, fast_run):
        assert len(fast_run) == fast_cfg.n_control_cycles
        assert [o.n for o in fast_run] == list(
            range(1, fast_cfg.n_control_cycles + 1)
        )

    def test_tail_mean(self, fast_run):
        vals = [o.L for o in fast_run if o.n >= 5]
        assert tail_mean(fast_run, start=5) == pytest.approx(
            sum(vals) / len(vals)
        )
        with pytest.raises(ValueError):
            tail_mean(fast_run, start=100)

    def test_trajectory_csv_schema(self, fast_run, tmp_path):
        out = tmp_path / "traj.csv"
        write_trajectory_csv(fast_run, out)
        rows = read_csv(out)
        assert rows[0] == TRAJECTORY_HEADER
        assert len(rows) == len(fast_run) + 1
        assert rows[1][0] == "1"
        assert float(rows[1][1]) == fast_run[0].theta

    def test_trajectory_csv_deterministic(self, fast_cfg, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trajectory_csv(run_experiment(fast_cfg), a)
        write_trajectory_csv(run_experiment(fast_cfg), b)
        assert a.read_bytes() == b.read_bytes()

    def test_trace_csv_schema(self, fast_cfg, tmp_path):
        from fluidlight.rates import generate_arrival
        from fluidlight.simulate import simulate_control_cycle

        arr = generate_arrival(fast_cfg.arrival, fast_cfg.control_horizon,
                               fast_cfg.seed)
        path = simulate_control_cycle(0.5, arr, fast_cfg.service,
                                      fast_cfg.light_cycles)
        out = tmp_path / "trace.csv"
        write_trace_csv(path, out)
        rows = read_csv(out)
        assert rows[0] == TRACE_HEADER
        assert len(rows) == len(path.events) + 1
        kinds = {r[4] for r in rows[1:]}
        assert "Horizon" in kinds

    def test_replicate_aggregates(self, fast_cfg):
        stats = replicate(fast_cfg, 3)
        assert stats["n_seeds"] == 3
        assert len(stats["tail_means"]) == 3
        assert stats["mean_of_tail_means"] == pytest.approx(
            sum(stats["tail_means"]) / 3
        )
        assert stats["stdev_of_tail_means"] >= 0.0
        with pytest.raises(ValueError):
            replicate(fast_cfg, 0)

    def test_bundled_configs_load(self):
        for name in BUNDLED_CONFIGS:
            cfg = load_bundled_config(name)
            assert cfg.cycle_length == 1.0
            assert cfg.light_cycles == 20


@pytest.fixture(scope="module")
def small_figure_dir(tmp_path_factory):
    """Config directory mirroring the bundled set but much faster."""
    d = tmp_path_factory.mktemp("figcfg")
    base = FAST_CFG
    (d / "reference_zeta03.cfg").write_text(base)
    (d / "reference_zeta01.cfg").write_text(base.replace("zeta = 0.3", "zeta = 0.1"))
    (d / "reference_theta_init01.cfg").write_text(
        base.replace("theta_initial = 0.9", "theta_initial = 0.1")
    )
    return str(d)


class TestReproduceFigures:
    def test_emits_figure_files(self, small_figure_dir, tmp_path):
        out = tmp_path / "figs"
        runs = reproduce_figures(out, cfg_dir=small_figure_dir, plots=False)
        assert set(runs) == {"zeta03", "zeta01", "theta_init01"}
        fig3 = read_csv(out / "fig3.csv")
        assert fig3[0] == ["n", "L_zeta03", "L_zeta01"]
        assert len(fig3) == 13  # header + 12 control cycles
        fig5 = read_csv(out / "fig5.csv")
        assert fig5[0] == ["n", "theta_init09", "theta_init01"]
        assert float(fig5[1][1]) == 0.9
        assert float(fig5[1][2]) == 0.1
        summary = (out / "summary.txt").read_text()
        assert "tail_mean zeta=0.3:" in summary
        assert not (out / "fig3.png").exists()

    def test_plots_rendered(self, small_figure_dir, tmp_path):
        out = tmp_path / "figs"
        reproduce_figures(out, cfg_dir=small_figure_dir, plots=True)
        for name in ("fig3.png", "fig4.png", "fig5.png"):
            assert (out / name).stat().st_size > 0


class TestCli:
    def test_simulate_happy_path(self, fast_cfg_file, capsys):
        rc = cli.main(["simulate", "--config", fast_cfg_file, "--theta", "0.5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "L = " in out and "Lprime = " in out

    def test_simulate_writes_trace(self, fast_cfg_file, tmp_path, capsys):
        trace = str(tmp_path / "trace.csv")
        rc = cli.main(["simulate", "--config", fast_cfg_file,
                       "--theta", "0.5", "--trace", trace])
        assert rc == 0
        assert read_csv(trace)[0] == TRACE_HEADER

    def test_simulate_theta_out_of_range(self, fast_cfg_file, capsys):
        rc = cli.main(["simulate", "--config", fast_cfg_file, "--theta", "1.5"])
        assert rc == 2
        assert "theta" in capsys.readouterr().err

    def test_regulate_writes_trajectory(self, fast_cfg_file, tmp_path, capsys):
        out = str(tmp_path / "run")
        rc = cli.main(["regulate", "--config", fast_cfg_file, "--out", out])
        assert rc == 0
        rows = read_csv(os.path.join(out, "trajectory.csv"))
        assert rows[0] == TRAJECTORY_HEADER

    def test_regulate_missing_config(self, capsys):
        rc = cli.main(["regulate", "--config", "missing.cfg"])
        assert rc == 2
        assert "error" in capsys.readouterr().err

    def test_seed_override_changes_output(self, fast_cfg_file, tmp_path):
        a, b, c = (str(tmp_path / d) for d in ("a", "b", "c"))
        cli.main(["--seed", "1", "--quiet", "regulate",
                  "--config", fast_cfg_file, "--out", a])
        cli.main(["--seed", "1", "--quiet", "regulate",
                  "--config", fast_cfg_file, "--out", b])
        cli.main(["--seed", "2", "--quiet", "regulate",
                  "--config", fast_cfg_file, "--out", c])
        bytes_a = open(os.path.join(a, "trajectory.csv"), "rb").read()
        bytes_b = open(os.path.join(b, "trajectory.csv"), "rb").read()
        bytes_c = open(os.path.join(c, "trajectory.csv"), "rb").read()
        assert bytes_a == bytes_b
        assert bytes_a != bytes_c

    def test_validate_ipa(self, fast_cfg_file, tmp_path, capsys):
        out = str(tmp_path / "fd.csv")
        rc = cli.main(["validate-ipa", "--config", fast_cfg_file,
                       "--grid", "0.2:0.8:5", "--out", out])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == FD_HEADER
        assert len(rows) == 6

    def test_validate_ipa_bad_grid(self, fast_cfg_file, capsys):
        rc = cli.main(["validate-ipa", "--config", fast_cfg_file,
                       "--grid", "0.8:0.2:5"])
        assert rc == 2
        assert "--grid" in capsys.readouterr().err

    def test_replicate_csv(self, fast_cfg_file, tmp_path, capsys):
        out = str(tmp_path / "rep.csv")
        rc = cli.main(["replicate", "--config", fast_cfg_file,
                       "--seeds", "2", "--out", out])
        assert rc == 0
        rows = read_csv(out)
        assert rows[0] == ["seed", "tail_mean"]
        assert len(rows) == 3

    def test_reproduce_figures_subcommand(self, small_figure_dir, tmp_path,
                                          capsys):
        out = str(tmp_path / "figs")
        rc = cli.main(["reproduce-figures", "--out", out,
                       "--config-dir", small_figure_dir, "--no-plots"])
        assert rc == 0
        assert os.path.exists(os.path.join(out, "summary.txt"))

    def test_usage_error_exit_code(self, capsys):
        assert cli.main(["no-such-command"]) == 2
