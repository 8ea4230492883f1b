import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from leakywire.cli import EXIT_OK, EXIT_SOLVER, EXIT_USAGE, emit, load_results, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows_json(argv, capsys):
    code, out, err = run(argv + ["--format", "json"], capsys)
    return code, json.loads(out), err


def test_spectrum_default_csv_header(capsys):
    code, out, _ = run(["spectrum"], capsys)
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][0] == "point"
    assert "kappa [1/length]" in rows[0]
    assert "energy [1/length^2]" in rows[0]


def test_distance_sweep_rows(capsys):
    code, table, _ = rows_json(["spectrum", "--config", str(CONFIGS / "sweep_distance_2d.toml")], capsys)
    assert code == EXIT_OK
    assert table["failures"] == 0
    ground = [r for r in table["rows"] if r.get("level", 0) == 0]
    assert len(ground) == 13
    kappas = [r["kappa"] for r in ground]
    assert all(np.diff(kappas) < 0)


def test_spectrum_3d_below_threshold(capsys):
    code, table, _ = rows_json(["spectrum", "--dimension", "3"], capsys)
    assert code == EXIT_OK
    assert all(r["energy"] < -2.25 for r in table["rows"])


def test_bad_site_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text('schema_version = 1\ndimension = 2\nalpha = 3.0\n[[sites]]\nposition = [0.0, 0.0]\nbeta = 0.0\n')
    code, _, err = run(["spectrum", "--config", str(path)], capsys)
    assert code == EXIT_USAGE
    assert "site 0" in err


def test_toml_syntax_error_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("alpha = = 3\n")
    code, _, err = run(["spectrum", "--config", str(path)], capsys)
    assert code == EXIT_USAGE
    assert "line 1" in err


@pytest.mark.parametrize("argv", [["spectrum", "--jobs", "0"], ["spectrum", "--tol", "-1"], ["resonance", "--seed-re", "-1"]])
def test_bad_options_are_usage_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == EXIT_USAGE
    assert "error" in err


def test_unknown_subcommand_exits_nonzero():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code != 0


def test_resonance_distance_sweep_widths_shrink(capsys):
    code, table, _ = rows_json(["resonance", "--config", str(CONFIGS / "resonance_ladder_2d.toml")], capsys)
    assert code == EXIT_OK
    widths = [abs(r["im_z"]) for r in table["rows"]]
    assert len(widths) == 4
    assert all(np.diff(widths) < 0)
    assert all(r["im_z"] < 0 for r in table["rows"])


def test_resonance_coupling_sweep_columns(capsys):
    code, table, _ = rows_json(["resonance", "--config", str(CONFIGS / "coupling_break_2d.toml")], capsys)
    assert code == EXIT_OK
    for col in ("q", "measured_linear", "predicted_linear", "measured_quadratic", "predicted_quadratic"):
        assert col in table["columns"]
    assert len(table["rows"]) == 3


def test_resonance_single_point(capsys):
    code, table, _ = rows_json(["resonance"], capsys)
    assert code == EXIT_OK
    assert len(table["rows"]) == 1
    assert table["rows"][0]["im_z"] < 0


def test_resonance_refused_without_seed_when_not_embedded(tmp_path, capsys):
    path = tmp_path / "low.toml"
    path.write_text('schema_version = 1\ndimension = 2\nalpha = 2.0\n[[sites]]\nposition = [0.0, 2.0]\nbeta = 0.0\n')
    code, _, err = run(["resonance", "--config", str(path)], capsys)
    assert code == EXIT_USAGE
    assert "seed" in err


def test_scatter_3d_is_refused(capsys):
    code, _, err = run(["scatter", "--dimension", "3"], capsys)
    assert code == EXIT_USAGE
    assert "d=2 only" in err


def test_scatter_flux_defect(capsys):
    code, table, err = rows_json(["scatter", "--config", str(CONFIGS / "scatter_2d.toml")], capsys)
    assert code == EXIT_OK
    assert max(abs(r["unitarity_defect"]) for r in table["rows"]) < 1e-10
    assert "reflectance peak" in err


def test_verify_with_inadmissible_tolerance_fails(capsys):
    code, table, err = rows_json(["verify", "--tol", "1"], capsys)
    assert code == EXIT_SOLVER
    settings = [r for r in table["rows"] if r["name"] == "solver settings"]
    assert settings and not settings[0]["passed"]
    assert "[FAIL]" in err


def test_output_is_deterministic(capsys):
    argv = ["spectrum", "--config", str(CONFIGS / "sweep_distance_2d.toml")]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second


def test_json_round_trip_is_bit_exact(tmp_path, capsys):
    path = tmp_path / "out.json"
    code, _, _ = run(["resonance", "--config", str(CONFIGS / "resonance_ladder_2d.toml"), "--format", "json", "--output", str(path)], capsys)
    assert code == EXIT_OK
    table = load_results(path)
    buf = io.StringIO()
    emit(table, "json", buf)
    assert buf.getvalue() == path.read_text()
    again = load_results(path)
    assert [r["im_z"] for r in again["rows"]] == [r["im_z"] for r in table["rows"]]


def test_csv_floats_reparse_exactly(capsys):
    _, table, _ = rows_json(["resonance", "--config", str(CONFIGS / "resonance_ladder_2d.toml")], capsys)
    _, out, _ = run(["resonance", "--config", str(CONFIGS / "resonance_ladder_2d.toml")], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["im_z [1/length^2]"]) for r in rows] == [r["im_z"] for r in table["rows"]]


def test_parallel_output_matches_serial(capsys):
    argv = ["spectrum", "--config", str(CONFIGS / "sweep_distance_2d.toml")]
    serial = run(argv, capsys)
    parallel = run(argv + ["--jobs", "2"], capsys)
    assert serial == parallel


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "leakywire.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verify" in proc.stdout
