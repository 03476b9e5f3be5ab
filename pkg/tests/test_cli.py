import numpy as np
import pytest

import cachenet.cli as cli
from cachenet import ConfigError, QuadratureConvergenceError, parse_config
from cachenet.config import Experiment, default_config
from cachenet.experiments import RunResult, run

from oracles import STATIC_REF, DYNAMIC_REF, LOWER_BOUND_REF


def run_cli(*argv):
    return cli.main(list(argv))


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


@pytest.fixture(scope="module")
def sweep_hit_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep_hit")
    assert run_cli("sweep_hit", "--out", str(out)) == 0
    return out


@pytest.fixture(scope="module")
def optimize_out(tmp_path_factory):
    out = tmp_path_factory.mktemp("optimize")
    assert run_cli("optimize", "--out", str(out)) == 0
    return out


class TestSweepHit:
    @pytest.fixture
    def outdir(self, sweep_hit_out):
        return sweep_hit_out

    def test_schema(self, outdir):
        header, rows = read_csv(outdir / "sweep_hit.csv")
        assert header == ["p_hit", "ase_static", "ase_dynamic", "ase_dynamic_lb"]
        assert len(rows) == 101

    def test_reference_values_and_orderings(self, outdir):
        _, rows = read_csv(outdir / "sweep_hit.csv")
        data = np.array(rows, dtype=float)
        p_hit, ase_s, ase_d, ase_lb = data.T
        assert (ase_d >= ase_s - 1e-15).all()
        assert (ase_lb <= ase_d + 1e-12).all()
        gaps = ase_d - ase_lb
        assert (np.diff(gaps) <= 1e-12).all()  # bound tightens as hits grow
        for p, ref in STATIC_REF.items():
            i = np.argmin(np.abs(p_hit - p))
            assert ase_s[i] == pytest.approx(0.5 * 0.01 * ref, rel=1e-9)
        for p, ref in DYNAMIC_REF.items():
            i = np.argmin(np.abs(p_hit - p))
            assert ase_d[i] == pytest.approx(0.01 * ref, rel=1e-8)
        for p, ref in LOWER_BOUND_REF.items():
            i = np.argmin(np.abs(p_hit - p))
            assert ase_lb[i] == pytest.approx(0.01 * ref, rel=1e-9)

    def test_companion_plot_script(self, outdir):
        script = (outdir / "sweep_hit.gp").read_text()
        assert "sweep_hit.csv" in script
        assert "plot" in script

    def test_effective_config_round_trips(self, outdir):
        text = (outdir / "effective_config.cfg").read_text()
        config = parse_config(text)
        assert config.experiment is Experiment.SWEEP_HIT
        assert config.out_dir == str(outdir)


class TestFeasibleSetAndDensity:
    def test_feasible_set_files(self, tmp_path):
        assert run_cli("feasible_set", "--out", str(tmp_path)) == 0
        for c in ("1", "2.5", "5"):
            header, rows = read_csv(tmp_path / f"feasible_set_c{c}.csv")
            assert header == ["lambda", "s"]
            assert len(rows) == 128
            assert (tmp_path / f"feasible_set_c{c}.gp").exists()

    def test_density_sweep_schema_and_shape(self, tmp_path):
        assert run_cli(
            "sweep_density_ase", "--out", str(tmp_path), "--budget", "2.5"
        ) == 0
        header, rows = read_csv(tmp_path / "sweep_density_ase_c2.5.csv")
        assert header == ["lambda", "s_on_budget", "p_hit", "metric_static", "metric_dynamic"]
        assert len(rows) == 64
        data = np.array(rows, dtype=float)
        assert data[0, 0] == pytest.approx(1e-4)
        assert data[-1, 0] == pytest.approx(1e-2)


class TestOptimize:
    @pytest.fixture
    def outdir(self, optimize_out):
        return optimize_out

    def test_rows_and_reference_solution(self, outdir):
        header, rows = read_csv(outdir / "optimize.csv")
        assert header == [
            "problem", "policy", "budget",
            "lambda_star", "s_star", "objective", "objective_grid",
        ]
        assert len(rows) == 12  # 2 problems x 2 policies x 3 budgets
        row = next(r for r in rows if r[0] == "P1" and r[1] == "dynamic" and r[2] == "5")
        assert float(row[3]) == pytest.approx(1e-2)
        assert float(row[4]) == pytest.approx(5e4, rel=1e-9)
        assert float(row[5]) == pytest.approx(float(row[6]), rel=1e-6)
        row = next(r for r in rows if r[0] == "P2" and r[1] == "dynamic" and r[2] == "1")
        assert float(row[3]) == pytest.approx(1e-4)
        assert float(row[4]) == pytest.approx(1.95e6, rel=1e-9)


class TestExitCodes:
    def test_ok(self, tmp_path):
        assert run_cli("feasible_set", "--out", str(tmp_path)) == 0

    def test_missing_config_file(self, tmp_path):
        code = run_cli("sweep_hit", "--config", str(tmp_path / "nope.cfg"))
        assert code == cli.EXIT_CONFIG

    def test_invalid_config_value(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("alpha = 2\n")
        assert run_cli("sweep_hit", "--config", str(cfg)) == cli.EXIT_CONFIG

    def test_infeasible_budget(self, tmp_path):
        code = run_cli("optimize", "--out", str(tmp_path), "--budget", "0.001")
        assert code == cli.EXIT_INFEASIBLE

    def test_numeric_failure_maps_to_4(self, tmp_path, monkeypatch):
        def explode(config):
            raise QuadratureConvergenceError("no convergence", (0.1, 0.2))

        monkeypatch.setattr(cli, "run", explode)
        assert run_cli("sweep_hit", "--out", str(tmp_path)) == cli.EXIT_NUMERIC

    def test_validation_failure_status_maps_to_5(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            cli, "run", lambda config: RunResult(files=(), status=5)
        )
        assert run_cli("validate", "--out", str(tmp_path)) == cli.EXIT_VALIDATION

    def test_config_error_leaves_no_output_files(self, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("alpha = 2\n")
        assert run_cli("sweep_hit", "--config", str(cfg), "--out", str(out)) == 2
        assert not out.exists()


class TestOverrides:
    def test_flags_override_config_keys(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("budget = 9\nseed = 5\nsweep_points = 32\n")
        out = tmp_path / "o"
        assert run_cli(
            "feasible_set", "--config", str(cfg), "--out", str(out), "--budget", "1",
            "--seed", "77",
        ) == 0
        effective = parse_config((out / "effective_config.cfg").read_text())
        assert effective.budgets == (1.0,)
        assert effective.seed == 77
        assert effective.sweep.points == 32
        assert (out / "feasible_set_c1.csv").exists()

    def test_help_documents_keys(self, capsys):
        with pytest.raises(SystemExit) as excinfo:
            run_cli("--help")
        assert excinfo.value.code == 0
        text = capsys.readouterr().out
        for key in ("lambda", "rho_bh", "price_storage", "truncation_fraction"):
            assert key in text
        assert "SCs/m^2" in text


class TestDeterminism:
    def test_sweep_and_optimize_runs_are_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run_cli("sweep_hit", "--out", str(out)) == 0
            assert run_cli("optimize", "--out", str(out)) == 0
        for name in ("sweep_hit.csv", "optimize.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_validate_runs_are_byte_identical(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            code = run_cli(
                "validate", "--out", str(out), "--trials", "2000", "--seed", "11"
            )
            assert code in (0, 5)  # 2000 trials is statistically fragile; bytes matter here
        assert (out1 / "validate.csv").read_bytes() == (out2 / "validate.csv").read_bytes()

    def test_validate_schema_and_content(self, tmp_path):
        assert run_cli(
            "validate", "--out", str(tmp_path), "--trials", "4000", "--seed", "3"
        ) in (0, 5)
        header, rows = read_csv(tmp_path / "validate.csv")
        assert header == [
            "policy", "lambda", "p_hit", "theta",
            "p_analytic", "p_hat", "std_error", "pass",
        ]
        assert len(rows) == 90  # 2 policies x 3 densities x 5 hit probs x 3 thresholds
        assert {r[0] for r in rows} == {"static", "dynamic"}
        assert all(r[7] in ("0", "1") for r in rows)


def test_run_requires_experiment():
    config = default_config()
    with pytest.raises(ConfigError):
        run(config)


def test_density_sweep_intersects_empty_interval(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("sweep_start = 0.5\nsweep_stop = 0.9\n")  # beyond lambda_max
    code = run_cli(
        "sweep_density_ee", "--config", str(cfg), "--out", str(tmp_path / "o")
    )
    assert code == cli.EXIT_INFEASIBLE
