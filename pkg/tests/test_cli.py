import csv
import math

import numpy as np
import pytest

from grpsse import cli
from grpsse.cli import (
    ConfigError,
    config_from_args,
    convergence_rates,
    main,
    observed_orders,
    read_config_file,
)
from grpsse.errors import UnphysicalStateError


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_config_file_and_flag_precedence(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\nproblem = tov\ncells = 64  # trailing\nscheme=godunov\n"
                        "convergence = 25, 50\n")
    cfg = config_from_args(["--config", str(cfg_file), "--cells", "32", "--out", str(tmp_path)])
    assert cfg.problem == "tov"
    assert cfg.scheme == "godunov"
    assert cfg.n_cells == 32
    assert cfg.convergence == [25, 50]


def test_config_file_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("problem tov\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)
    bad.write_text("colour = red\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)


@pytest.mark.parametrize("argv", [
    ["--problem", "nope"],
    ["--scheme", "weno"],
    ["--cells", "2"],
    ["--cells", "ten"],
    ["--cfl", "1.5"],
    ["--theta", "2.5"],
    ["--convergence", "50"],
    ["--problem", "frw1", "--grp-probe"],
    ["--problem", "shock", "--grp-probe", "0.1,-0.1"],
    ["--problem", "shock", "--grp-probe", "--probe-cells", "30"],
    ["--cell-values", "median"],
    ["--problem", "shock", "--grp-probe", "--probe-extrapolate", "maybe"],
])
def test_bad_configuration_exits_with_1(argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path)]) == cli.EXIT_CONFIG


def test_missing_config_file_exits_with_1(tmp_path):
    assert main(["--config", str(tmp_path / "absent.cfg")]) == cli.EXIT_CONFIG


def test_io_error_exits_with_3(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["--cells", "8", "--t-end", "15.01", "--out", str(blocker / "sub")]) == cli.EXIT_IO


def test_solver_failure_exits_with_2(monkeypatch, tmp_path):
    def boom(cfg):
        raise UnphysicalStateError("negative density", index=3, time=1.0)

    monkeypatch.setattr(cli, "run_single", boom)
    assert main(["--out", str(tmp_path)]) == cli.EXIT_SOLVER


def test_default_grp_probe_times():
    cfg = config_from_args(["--problem", "shock", "--grp-probe"])
    assert cfg.grp_probe == list(cli.DEFAULT_TAUS)
    assert cfg.probe_extrapolate is True


def test_output_directory_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env_out"))
    assert str(config_from_args([]).out) == str(tmp_path / "env_out")


def test_convergence_rates_helper():
    rates = convergence_rates([25, 50, 100], [4.0, 1.0, 0.25])
    assert math.isnan(rates[0])
    assert rates[1:] == [pytest.approx(2.0), pytest.approx(2.0)]
    assert convergence_rates([10, 30], [9.0, 1.0])[1] == pytest.approx(2.0)
    assert math.isnan(convergence_rates([10, 20], [0.0, 0.0])[1])


def test_observed_orders_helper():
    orders = observed_orders([0.2, 0.1], [4e-4, 1e-4])
    assert math.isnan(orders[0]) and orders[1] == pytest.approx(2.0)


def test_single_run_outputs(tmp_path):
    code = main(["--problem", "frw1", "--cells", "20", "--t-end", "15.2", "--snapshots", "15.1",
                 "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    sol = _rows(tmp_path / "frw1_grp_20_solution.csv")
    assert sol[0] == cli.SOLUTION_HEADER + cli.EXACT_HEADER
    assert len(sol) == 21
    values = np.array(sol[1:], dtype=float)
    np.testing.assert_allclose(values[:, 1], values[:, 5], rtol=1e-3)
    res = _rows(tmp_path / "frw1_grp_20_residuals.csv")
    assert res[0] == ["t", "residual"] and float(res[-1][0]) == pytest.approx(15.2)
    assert (tmp_path / "frw1_grp_20_t15.1.csv").exists()
    summary = (tmp_path / "frw1_grp_20_summary.txt").read_text()
    assert "final_residual" in summary and "l1_error_rho" in summary


def test_convergence_table(tmp_path):
    assert main(["--problem", "frw1", "--convergence", "20,40", "--out", str(tmp_path)]) == cli.EXIT_OK
    rows = _rows(tmp_path / "frw1_grp_convergence.csv")
    assert rows[0][:3] == ["N", "rho_error", "rho_rate"]
    assert [r[0] for r in rows[1:]] == ["20", "40"]
    assert 1.5 < float(rows[2][2]) < 2.5


def test_grp_probe_on_coarse_reference(tmp_path, capsys):
    code = main(["--problem", "shock", "--grp-probe", "0.16,0.08", "--probe-cells", "200",
                 "--out", str(tmp_path)])
    assert code == cli.EXIT_OK
    rows = _rows(tmp_path / "shock_grp_probe.csv")
    assert rows[0] == ["tau", "e_grp", "order"]
    e16, e08 = float(rows[1][1]), float(rows[2][1])
    assert 1.5 < math.log(e16 / e08) / math.log(2.0) < 2.5
    assert "order" in capsys.readouterr().out
