"""Command-line surface and the SVG chart emitter."""

import json

import numpy as np
import pytest

from fonls import cli
from fonls.fieldio import load_field
from fonls.plots import emit_plots, render_chart
from fonls.spectral import make_grid, sup_norm


def run_cli(*argv):
    return cli.main(list(argv))


def test_no_arguments_is_usage_error(capsys):
    assert run_cli() == cli.EXIT_USAGE
    capsys.readouterr()


def test_unknown_subcommand(capsys):
    assert run_cli("frobnicate") == cli.EXIT_USAGE
    capsys.readouterr()


def test_groundstate_roundtrip(tmp_path, capsys):
    out = tmp_path / "q.bin"
    report = tmp_path / "q.json"
    code = run_cli("groundstate", "--p", "13", "--length", "50",
                   "--npoints", "256", "--out", str(out),
                   "--report", str(report))
    assert code == cli.EXIT_OK
    payload = json.loads(report.read_text())
    assert payload["converged"]
    assert payload["residual_linf"] < 1e-9
    assert max(payload["identity_residuals"]) < 1e-8
    q = load_field(out, make_grid(256, 50.0))
    assert sup_norm(q) > 1.0
    capsys.readouterr()


def test_groundstate_nonconvergence_exit_code(tmp_path, capsys):
    code = run_cli("groundstate", "--p", "13", "--length", "50",
                   "--npoints", "256", "--max-iter", "3")
    assert code == cli.EXIT_NUMERICAL
    capsys.readouterr()


def test_evolve_from_saved_field(tmp_path, capsys):
    qfile = tmp_path / "q.bin"
    assert run_cli("groundstate", "--p", "13", "--length", "50",
                   "--npoints", "256", "--out", str(qfile)) == cli.EXIT_OK
    csv_path = tmp_path / "series.csv"
    summary_path = tmp_path / "summary.json"
    code = run_cli("evolve", "--init", str(qfile), "--p", "13",
                   "--length", "50", "--npoints", "256",
                   "--dt", "1e-2", "--tfinal", "1.0",
                   "--out-csv", str(csv_path),
                   "--out-summary", str(summary_path))
    assert code == cli.EXIT_OK
    summary = json.loads(summary_path.read_text())
    assert summary["terminal_status"] == "Completed"
    # coarse grid: the dealiasing projection removes a little true mass
    assert summary["mass_drift"] < 1e-6
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("time,mass,energy")
    assert len(lines) > 5
    capsys.readouterr()


def test_evolve_gaussian_literal(tmp_path, capsys):
    summary_path = tmp_path / "summary.json"
    code = run_cli("evolve", "--init", "gaussian:0.3,2", "--p", "13",
                   "--length", "50", "--npoints", "256",
                   "--dt", "1e-2", "--tfinal", "0.5",
                   "--out-summary", str(summary_path))
    assert code == cli.EXIT_OK
    assert json.loads(summary_path.read_text())["terminal_status"] == \
        "Completed"
    capsys.readouterr()


def test_evolve_threshold_block_for_scaled_groundstate(tmp_path, capsys):
    summary_path = tmp_path / "summary.json"
    code = run_cli("evolve", "--init", "groundstate-scaled:0.4", "--p", "13",
                   "--length", "50", "--npoints", "256",
                   "--dt", "1e-2", "--tfinal", "0.5",
                   "--out-summary", str(summary_path))
    assert code == cli.EXIT_OK
    summary = json.loads(summary_path.read_text())
    assert summary["threshold"]["classification"] == "BelowBoth"
    capsys.readouterr()


def test_missing_field_file(capsys):
    assert run_cli("evolve", "--init", "/nonexistent.bin", "--p", "13",
                   "--dt", "1e-2", "--tfinal", "0.1") == cli.EXIT_USAGE
    capsys.readouterr()


def test_check_suite_passes(tmp_path, capsys):
    out = tmp_path / "check.json"
    assert run_cli("check", "--out", str(out)) == cli.EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["ok"]
    capsys.readouterr()


def test_decay_subcommand(tmp_path, capsys):
    out = tmp_path / "decay.json"
    csv_out = tmp_path / "decay.csv"
    code = run_cli("decay", "--length", "200", "--npoints", "2048",
                   "--tmin", "2", "--tmax", "12", "--samples", "10",
                   "--out", str(out), "--out-csv", str(csv_out))
    assert code == cli.EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["exponent"] == pytest.approx(-0.25, abs=0.07)
    assert csv_out.exists()
    capsys.readouterr()


def _sweep_config(tmp_path):
    cfg = {
        "p": 13.0,
        "family": "gaussian",
        "members": [[0.3, 2.0]],
        "grid": {"n_points": 256, "length": 50.0},
        "evolve": {"dt": 0.01, "t_final": 2.0, "record_every": 2},
    }
    path = tmp_path / "sweep.json"
    path.write_text(json.dumps(cfg))
    return path


def test_sweep_end_to_end(tmp_path, capsys):
    cfg = _sweep_config(tmp_path)
    out_dir = tmp_path / "out"
    code = run_cli("--out-dir", str(out_dir), "sweep", "--config", str(cfg),
                   "--print-config")
    assert code == cli.EXIT_OK
    summaries = json.loads((out_dir / "summaries.json").read_text())
    assert len(summaries) == 1
    assert summaries[0]["error"] is None
    table = (out_dir / "phase_table.csv").read_text().splitlines()
    assert table[0] == "parameter,me_ratio,grad_ratio,verdict"
    assert len(table) == 2
    capsys.readouterr()


def test_plot_subcommand(tmp_path, capsys):
    csv_path = tmp_path / "series.csv"
    csv_path.write_text("time,mass\n0,1.0\n1,0.9\n2,0.8\n")
    out_dir = tmp_path / "charts"
    assert run_cli("--out-dir", str(out_dir), "plot",
                   str(csv_path)) == cli.EXIT_OK
    svg = (out_dir / "series.svg").read_text()
    assert svg.startswith("<svg")
    assert "polyline" in svg
    capsys.readouterr()


def test_plots_deterministic(tmp_path):
    csv_path = tmp_path / "s.csv"
    csv_path.write_text("t,a,b\n0,1.0,2.0\n1,1.5,1.0\n2,0.5,3.0\n")
    first = emit_plots([csv_path], tmp_path / "o1")[0].read_bytes()
    second = emit_plots([csv_path], tmp_path / "o2")[0].read_bytes()
    assert first == second


def test_plots_reject_malformed_csv(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("t,a\n0,1.0\n1\n")
    with pytest.raises(ValueError, match="line 3"):
        emit_plots([bad], tmp_path / "o")
    empty = tmp_path / "empty.csv"
    empty.write_text("t,a\n")
    with pytest.raises(ValueError):
        emit_plots([empty], tmp_path / "o")
    nonnum = tmp_path / "nn.csv"
    nonnum.write_text("t,a\n0,x\n")
    with pytest.raises(ValueError, match="line 2"):
        emit_plots([nonnum], tmp_path / "o")


def test_render_chart_single_point_range():
    header = ["t", "a"]
    columns = [[0.0, 1.0], [2.0, 2.0]]
    svg = render_chart(header, columns)
    assert "NaN" not in svg and "nan" not in svg
