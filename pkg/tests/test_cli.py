import json

import numpy as np
import pytest

from fbec import sweep as sweep_mod
from fbec.channel import NetworkConfig
from fbec.cli import main
from fbec.config import ConfigError, scenario_from_dict
from fbec.errors import DomainError
from fbec.figures import figure
from fbec.sweep import SweepSpec, read_csv, run_sweep

FIG2_N5 = {"n_nodes": 5, "snr_linear": 2, "blocklength": 1000, "theta": 0.01}


@pytest.fixture
def write_config(tmp_path):
    def _write(data, name="cfg.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data) if isinstance(data, dict) else data)
        return str(path)

    return _write


def report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_ec_report(write_config, capsys):
    assert main(["ec", "--config", write_config(FIG2_N5), "--eps-target", "1e-3"]) == 0
    out = report(capsys.readouterr().out)
    assert float(out["rho_i"]) == pytest.approx(2 / 9)
    assert float(out["ec_max"]) == pytest.approx(0.11, abs=0.01)
    assert float(out["eps_star"]) == pytest.approx(2.5e-2, rel=0.3)
    assert out["constraint_active"] == "true"
    assert float(out["ec_op"]) == pytest.approx(0.10, abs=0.01)


def test_single_node_echoes_snr(write_config, capsys):
    assert main(["ec", "--config", write_config(dict(FIG2_N5, n_nodes=1))]) == 0
    assert float(report(capsys.readouterr().out)["rho_i"]) == 2.0


def test_snr_in_db_is_echoed_linear(write_config, capsys):
    cfg = {k: v for k, v in FIG2_N5.items() if k != "snr_linear"}
    cfg["snr_db"] = 10.0
    assert main(["ec", "--config", write_config(cfg)]) == 0
    assert float(report(capsys.readouterr().out)["snr_linear"]) == pytest.approx(10.0)


@pytest.mark.parametrize(
    "data, field",
    [
        (dict(FIG2_N5, theta="fast"), "theta"),
        (dict(FIG2_N5, n_nodes=0), "n_nodes"),
        (dict(FIG2_N5, colour="red"), "colour"),
        ({k: v for k, v in FIG2_N5.items() if k != "blocklength"}, "blocklength"),
        (dict(FIG2_N5, snr_db=3), "snr_db"),
        (dict(FIG2_N5, target_eps=2), "target_eps"),
        (dict(FIG2_N5, priorities=[1]), "priorities"),
    ],
)
def test_malformed_config_names_field(write_config, capsys, data, field):
    assert main(["ec", "--config", write_config(data)]) == 2
    assert field in capsys.readouterr().err


def test_unparsable_config(write_config, capsys):
    assert main(["ec", "--config", write_config("{not json")]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["figure", "fig99"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["ec"])
    assert exc.value.code == 2


def test_scenario_priorities_forms():
    a = scenario_from_dict(dict(FIG2_N5, priorities=[1, 4]))
    b = scenario_from_dict(dict(FIG2_N5, priorities={"eta_alpha": 1, "eta_theta": 4}))
    assert a.priorities == b.priorities == (1.0, 4.0)
    with pytest.raises(ConfigError):
        scenario_from_dict([1, 2])


def test_compensate_commands(write_config, capsys):
    assert main(["compensate", "power", "--config", write_config(dict(FIG2_N5, n_nodes=3, snr_linear=0.5))]) == 0
    out = report(capsys.readouterr().out)
    assert float(out["rho_c"]) == 1.0 and out["restores_free_ec"] == "true"

    fig7 = {"n_nodes": 5, "snr_linear": 1, "blocklength": 1000, "theta": 0.05}
    assert main(["compensate", "delay", "--config", write_config(fig7)]) == 0
    out = report(capsys.readouterr().out)
    assert float(out["theta_i"]) == pytest.approx(0.023, abs=0.002)
    assert float(out["d_max_before"]) == pytest.approx(3600, rel=0.1)

    joint = {"n_nodes": 15, "snr_linear": 2, "blocklength": 1000, "theta": 0.1}
    args = ["compensate", "joint", "--config", write_config(joint), "--priorities", "1,4", "--rho-s-op", "0.057"]
    assert main(args) == 0
    out = report(capsys.readouterr().out)
    assert float(out["eta"]) == pytest.approx(float(out["alpha_c_op"]) + 4 * float(out["theta2"]))


def test_compensate_infeasible_exits_1(write_config, capsys):
    crowded = {"n_nodes": 50, "snr_linear": 10, "blocklength": 1000, "theta": 0.01}
    assert main(["compensate", "delay", "--config", write_config(crowded)]) == 1
    assert "numerical failure" in capsys.readouterr().err


# sweeps ---------------------------------------------------------------------


def test_sweep_steps_validation(write_config):
    cfg = write_config(FIG2_N5)
    assert main(["sweep", "--config", cfg, "--axis", "eps", "--start", "1e-6", "--stop", "0.5", "--steps", "1"]) == 2
    assert main(["sweep", "--config", cfg, "--axis", "eps", "--start", "0.5", "--stop", "1e-6", "--steps", "5"]) == 2
    assert main(["sweep", "--config", cfg, "--axis", "eps", "--start", "1e-6", "--stop", "1.5", "--steps", "5"]) == 2


def test_eps_sweep_reproduces_fig2_curve(write_config, tmp_path):
    out = tmp_path / "eps.csv"
    args = ["sweep", "--config", write_config(FIG2_N5), "--axis", "eps", "--start", "1e-6",
            "--stop", "0.5", "--steps", "60", "--log", "--out", str(out)]
    assert main(args) == 0
    table = read_csv(out)
    assert len(table.rows) == 60
    assert table.metadata["config"] == {"n_nodes": 5, "snr_linear": 2.0, "blocklength": 1000, "theta": 0.01}
    curve = table.column("ec")
    k = int(np.argmax(curve))
    assert 0 < k < 59 and curve[k] == pytest.approx(0.11, abs=0.01)


def test_node_sweep_alpha_c_decreasing():
    spec = SweepSpec("n_nodes", 2, 30, 29, NetworkConfig(5, 1.0, 1000, 0.1))
    table = run_sweep(spec, jobs=4)
    assert table.column("n_nodes").tolist() == list(range(2, 31))
    assert np.all(np.diff(table.column("alpha_c")) < 0)


@pytest.mark.parametrize("axis, lo, hi", [("theta", 1e-3, 0.1), ("snr", 0.1, 10.0), ("d_max", 10.0, 5000.0)])
def test_other_axes(axis, lo, hi):
    table = run_sweep(SweepSpec(axis, lo, hi, 5, NetworkConfig(5, 1.0, 1000, 0.05), log_spacing=True))
    assert len(table.rows) == 5 and table.header[0] == axis


def test_rho_s_op_sweep_bounds():
    base = NetworkConfig(15, 2.0, 1000, 0.1)
    table = run_sweep(SweepSpec("rho_s_op", 0.05, 0.06, 3, base))
    assert table.header[-1] == "eta"
    with pytest.raises(DomainError):
        SweepSpec("rho_s_op", 0.01, 0.06, 3, base)
    with pytest.raises(DomainError):
        SweepSpec("n_nodes", 2, 5, 10, base)


def test_failed_points_dropped_and_logged(monkeypatch, caplog):
    real = sweep_mod.psi

    def flaky(sinr, theta, T, eps, method):
        if eps > 0.1:
            raise sweep_mod.NumericalError("synthetic failure")
        return real(sinr, theta, T, eps, method)

    monkeypatch.setattr(sweep_mod, "psi", flaky)
    table = run_sweep(SweepSpec("eps", 0.01, 0.3, 5, NetworkConfig(5, 2.0)))
    assert len(table.rows) < 5 and len(table.metadata["dropped"]) == 5 - len(table.rows)
    assert "synthetic failure" in caplog.text


def test_all_points_failing_exits_1(monkeypatch, write_config):
    def broken(*args):
        raise sweep_mod.NumericalError("always")

    monkeypatch.setattr(sweep_mod, "psi", broken)
    args = ["sweep", "--config", write_config(FIG2_N5), "--axis", "eps", "--start", "0.01", "--stop", "0.1", "--steps", "3"]
    assert main(args) == 1


def test_csv_identical_across_runs_and_threads(write_config, tmp_path):
    paths = []
    for jobs in (1, 1, 6):
        path = tmp_path / f"s{len(paths)}.csv"
        args = ["sweep", "--config", write_config(FIG2_N5), "--axis", "n_nodes", "--start", "1",
                "--stop", "12", "--steps", "12", "--eps-target", "1e-3", "--jobs", str(jobs), "--out", str(path)]
        assert main(args) == 0
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]


# figures --------------------------------------------------------------------


def test_fig2_curves_concave_with_interior_max():
    table = figure("fig2", points=80)
    for n in (1, 5, 10):
        curve = table.column(f"ec_exact_N{n}")
        k = int(np.argmax(curve))
        assert 0 < k < len(curve) - 1
        assert table.metadata["optima"][f"N{n}"]["ec_max"] >= curve.max() - 1e-12


def test_fig7_crossings(tmp_path):
    out = tmp_path / "fig7.csv"
    assert main(["figure", "fig7", "--out", str(out)]) == 0
    meta = read_csv(out).metadata
    assert meta["d_max_before"] == pytest.approx(3600, rel=0.1)
    assert meta["d_max_after"] == pytest.approx(4600, rel=0.1)


def test_fig9_argmax():
    table = figure("fig9", points=60)
    k = int(np.argmax(table.column("eta")))
    assert table.column("rho_s_op")[k] == pytest.approx(0.057, abs=0.005)
    assert table.metadata["optimum"]["rho_s_op"] == pytest.approx(0.057, abs=0.005)


@pytest.mark.parametrize("name", ["fig3", "fig4", "fig5", "fig6", "fig8"])
def test_other_figures_have_metadata_and_rows(name):
    table = figure(name, points=20)
    assert table.rows and table.metadata["figure"] == name and table.metadata["dropped"] == []
    assert "defaults" in table.metadata
