"""
Verification of the Command Line
================================
Tests:
1. Trajectory CSV schema and scenario file round trip.
2. simulate: exit codes, output files, summary metrics.
3. plot: bad input, deterministic SVG output.
4. sweep and verify end to end on tiny runs.
"""
import csv
import json

import numpy as np
import pytest

import sim.runner as runner
from cli.commands import main, default_out_dir, EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED
from cli.csv_io import TRAJECTORY_COLUMNS, read_trajectory_csv, convergence_metrics
from cli.plots import plot_figures
from models.errors import ControlError, DegenerateThrust
from models.scenario import SCENARIO_DIR, bundled_scenario, dump_scenario, parse_scenario

HOVER = str(SCENARIO_DIR / "hover.json")


def simulate_hover(out, duration):
    return main(["simulate", "--scenario", HOVER, "--out", str(out), "--duration", str(duration)])


# --- schema ---

def test_trajectory_columns():
    assert len(TRAJECTORY_COLUMNS) == 76
    assert len(set(TRAJECTORY_COLUMNS)) == 76
    assert TRAJECTORY_COLUMNS[0] == "t"


def test_scenario_round_trip(reference):
    back = parse_scenario(dump_scenario(reference))
    assert back.name == reference.name
    assert back.gains == reference.gains
    assert back.integrator == reference.integrator
    assert np.array_equal(back.state0.pack(), reference.state0.pack())
    assert np.array_equal(back.params.x, reference.params.x)


# --- simulate ---

def test_collinear_scenario_is_a_config_error(tmp_path, capsys):
    doc = json.loads((SCENARIO_DIR / "hover.json").read_text(encoding="utf-8"))
    for i, quad in enumerate(doc["params"]["quadrotors"]):
        quad["x"] = [0.5 * i, 0.0, 0.0]
    path = tmp_path / "collinear.json"
    path.write_text(json.dumps(doc), encoding="utf-8")

    code = main(["simulate", "--scenario", str(path), "--out", str(tmp_path / "out")])
    assert code == EXIT_CONFIG
    assert "rank" in capsys.readouterr().out
    assert not (tmp_path / "out" / "trajectory.csv").exists()


def test_missing_scenario_is_a_config_error(tmp_path):
    assert main(["simulate", "--scenario", str(tmp_path / "nope.json")]) == EXIT_CONFIG


def test_zero_duration_writes_one_row(tmp_path):
    assert simulate_hover(tmp_path, 0) == EXIT_OK
    header, matrix = read_trajectory_csv(tmp_path / "trajectory.csv")
    assert header == TRAJECTORY_COLUMNS
    assert matrix.shape == (1, 76)
    assert (tmp_path / "controls.csv").exists()


def test_summary_matches_trajectory_file(tmp_path):
    assert simulate_hover(tmp_path, 0.05) == EXIT_OK
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    _, matrix = read_trajectory_csv(tmp_path / "trajectory.csv")
    assert summary["status"] == "ok"
    assert summary["samples"] == 51
    assert summary["metrics"] == convergence_metrics(matrix)
    assert summary["terminal_state"]["t"] == pytest.approx(0.05)


def test_control_failure_still_writes_outputs(tmp_path, monkeypatch):
    real = runner.compute_controls

    def failing(s, g, mem, p, dt):
        if mem.ticks == 5:
            raise ControlError(2, "attitude", DegenerateThrust(0.0, 1e-6))
        return real(s, g, mem, p, dt)

    monkeypatch.setattr(runner, "compute_controls", failing)
    assert simulate_hover(tmp_path, 0.05) == EXIT_DIVERGED
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    _, matrix = read_trajectory_csv(tmp_path / "trajectory.csv")
    assert summary["status"] == "failed"
    assert summary["samples"] == 5 and matrix.shape == (5, 76)
    assert summary["diverged_at"] == pytest.approx(5e-3)
    assert summary["error"].startswith("quadrotor 3 (attitude)")


def test_bad_duration_override(tmp_path):
    assert main(["simulate", "--scenario", HOVER, "--out", str(tmp_path), "--duration", "-1"]) == EXIT_CONFIG


# --- plot ---

def test_plot_rejects_empty_csv(tmp_path):
    empty = tmp_path / "trajectory.csv"
    empty.write_text("", encoding="utf-8")
    assert main(["plot", "--traj", str(empty), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_plot_rejects_unknown_figure(tmp_path):
    with pytest.raises(SystemExit):
        main(["plot", "--traj", str(tmp_path / "t.csv"), "--figs", "spaghetti"])


def test_plots_are_deterministic(tmp_path):
    assert simulate_hover(tmp_path, 0.02) == EXIT_OK
    _, matrix = read_trajectory_csv(tmp_path / "trajectory.csv")
    first = plot_figures(matrix, ["ball-pos", "attitude"], tmp_path / "a")
    second = plot_figures(matrix, ["ball-pos", "attitude"], tmp_path / "b")
    for a, b in zip(first, second):
        assert a.name == b.name
        assert a.read_bytes() == b.read_bytes()


def test_plot_command_writes_every_figure(tmp_path):
    assert simulate_hover(tmp_path, 0.02) == EXIT_OK
    figs = tmp_path / "figs"
    assert main(["plot", "--traj", str(tmp_path / "trajectory.csv"), "--out", str(figs)]) == EXIT_OK
    assert {p.name for p in figs.glob("*.svg")} == {
        "attitude.svg", "omega.svg", "plate-pos.svg", "plate-vel.svg", "ball-pos.svg", "ball-vel.svg"
    }


# --- sweep ---

def test_sweep_over_eps(tmp_path):
    code = main(["sweep", "--scenario", HOVER, "--param", "eps", "--values", "0.1,0.05",
                 "--duration", "0.02", "--out", str(tmp_path)])
    assert code == EXIT_OK
    with open(tmp_path / "sweep" / "sweep.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert [float(r["value"]) for r in rows] == [0.1, 0.05]
    assert all(r["status"] == "ok" for r in rows)
    assert (tmp_path / "sweep" / "eps=0.1" / "trajectory.csv").exists()
    assert (tmp_path / "sweep" / "eps=0.05" / "summary.json").exists()


def test_sweep_rejects_unknown_parameter(tmp_path):
    code = main(["sweep", "--scenario", HOVER, "--param", "k99", "--values", "1",
                 "--duration", "0.02", "--out", str(tmp_path)])
    assert code == EXIT_CONFIG


# --- verify ---

def test_quick_verify_writes_report(tmp_path):
    code = main(["verify", "--quick", "--suite", "algebra", "gains", "--seed", "5", "--out", str(tmp_path)])
    assert code == EXIT_OK
    report = json.loads((tmp_path / "verify.json").read_text(encoding="utf-8"))
    assert report["passed"] is True
    assert report["seed"] == 5
    assert {r["suite"] for r in report["results"]} == {"algebra", "gains"}


# --- environment ---

def test_out_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("PLATE_SWARM_OUT", str(tmp_path))
    assert default_out_dir() == str(tmp_path)
    monkeypatch.delenv("PLATE_SWARM_OUT")
    assert default_out_dir() == "./out"


def test_bundled_scenarios_load():
    for name in ("reference", "hover", "passive", "attitude_only"):
        assert bundled_scenario(name).name
