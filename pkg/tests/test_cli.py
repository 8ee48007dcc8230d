import subprocess
import sys

import numpy as np
import pytest

from cvbell.bell import SWEEP_CSV_HEADER
from cvbell.cli import main, parse_angles
from cvbell.protocol import DATASET_CSV_HEADER, ESTIMATE_CSV_HEADER


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def grab(out: str, key: str) -> float:
    for line in out.splitlines():
        if line.startswith(key + " = "):
            return float(line.split(" = ")[1])
    raise AssertionError(f"{key!r} not found in output:\n{out}")


def test_parse_angles_forms():
    assert parse_angles("max").theta_b_prime == 0.0
    angles = parse_angles("0.1, 0.2,0.3 ,0.4")
    assert angles.as_tuple() == (0.1, 0.2, 0.3, 0.4)
    with pytest.raises(ValueError):
        parse_angles("0.1,0.2")
    with pytest.raises(ValueError):
        parse_angles("a,b,c,d")


def test_analytic_low_gain_violation(capsys):
    code, out, _ = run_cli(
        capsys, "analytic", "--source", "down-converter", "--gain", "1.000001"
    )
    assert code == 0
    assert grab(out, "B") == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-3)


def test_analytic_unit_gain_degenerate(capsys):
    code, _, err = run_cli(capsys, "analytic", "--gain", "1")
    assert code == 3
    assert "error" in err


def test_analytic_sources_agree(capsys):
    _, out_dc, _ = run_cli(capsys, "analytic", "--source", "down-converter", "--gain", "1.1")
    _, out_opa, _ = run_cli(capsys, "analytic", "--source", "four-opa", "--gain", "1.1")
    dc_lines = out_dc.splitlines()
    opa_lines = out_opa.splitlines()
    assert len(dc_lines) == len(opa_lines)
    for a, b in zip(dc_lines, opa_lines):
        if a.startswith("source"):
            continue
        if " = " in a:
            key_a, val_a = a.rsplit(" = ", 1)
            key_b, val_b = b.rsplit(" = ", 1)
            assert key_a == key_b
            try:
                assert float(val_b) == pytest.approx(float(val_a), abs=1e-9)
            except ValueError:
                assert val_a == val_b
        else:
            assert a == b


def test_gain_and_percent_are_exclusive(capsys):
    code, _, err = run_cli(
        capsys, "analytic", "--gain", "1.1", "--percent-squeezing", "10"
    )
    assert code == 2
    code, _, err = run_cli(capsys, "analytic")
    assert code == 2


def test_unknown_flag_is_config_error(capsys):
    code = main(["analytic", "--gain", "1.1", "--frobnicate"])
    capsys.readouterr()
    assert code == 2


def test_percent_squeezing_flag(capsys):
    code, out, _ = run_cli(capsys, "optimize", "--percent-squeezing", "40")
    assert code == 0
    b_max = grab(out, "b_max")
    gain = grab(out, "gain")
    assert b_max == pytest.approx(2 * np.sqrt(2) * gain / (3 * gain - 2), abs=1e-6)


def test_sweep_writes_csv(tmp_path, capsys):
    out_csv = tmp_path / "sweep.csv"
    code, out, _ = run_cli(
        capsys, "sweep", "--s-min", "30", "--s-max", "70", "--steps", "3",
        "--output", str(out_csv),
    )
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == SWEEP_CSV_HEADER
    assert len(lines) == 4
    assert "violation_threshold_percent" in out
    raw = out_csv.read_bytes()
    assert b"\r" not in raw


def test_sweep_rejects_bad_range(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "sweep", "--s-min", "70", "--s-max", "30", "--output",
        str(tmp_path / "x.csv"),
    )
    assert code == 2


def test_simulate_reports_and_outputs(tmp_path, capsys):
    ds_csv = tmp_path / "windows.csv"
    rep_csv = tmp_path / "report.csv"
    args = (
        "simulate", "--percent-squeezing", "46", "--num-windows", "20000",
        "--seed", "9", "--dataset-csv", str(ds_csv), "--report-csv", str(rep_csv),
    )
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    assert "dark_port_check: PASS" in out
    b_est = grab(out, "B_estimate")
    b_se = grab(out, "B_std_error")
    b_ana = grab(out, "B_analytic")
    assert abs(b_est - b_ana) < 4 * b_se
    assert ds_csv.read_text().splitlines()[0] == DATASET_CSV_HEADER
    report = rep_csv.read_text().splitlines()
    assert report[0] == ESTIMATE_CSV_HEADER
    assert any(r.startswith("b_estimate,") for r in report)
    assert any(r.startswith("b_analytic,") for r in report)

    # byte-identical outputs for identical flags
    first = ds_csv.read_bytes()
    code, out2, _ = run_cli(capsys, *args)
    assert ds_csv.read_bytes() == first
    assert out2 == out


def test_simulate_dark_port_gate(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--percent-squeezing", "46", "--num-windows", "2000",
        "--seed", "1", "--n-dark", "1000", "--n-lo", "10000",
    )
    assert code == 4
    assert "dark_port_check: FAIL" in out
    assert "B_estimate" not in out
    assert "B_analytic" not in out
    # raw rates are still reported
    assert "R[++]" in out


def test_oracle_command(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--chi", "0.01")
    assert code == 0
    assert grab(out, "B") == pytest.approx(2.8284, abs=2e-3)


def test_oracle_two_photon_state(capsys):
    code, out, _ = run_cli(
        capsys, "oracle", "--chi", "0.3", "--state", "two-photon"
    )
    assert code == 0
    # printed at 9 significant digits
    assert grab(out, "B") == pytest.approx(2 * np.sqrt(2), abs=1e-7)


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for this study\ngain = 1.2\nangles = max\n")
    code, out, _ = run_cli(capsys, "--config", str(cfg), "analytic")
    assert code == 0
    assert grab(out, "gain") == pytest.approx(1.2)
    code, out, _ = run_cli(capsys, "--config", str(cfg), "analytic", "--gain", "1.5")
    assert code == 0
    assert grab(out, "gain") == pytest.approx(1.5)


def test_config_file_bad_line(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gain 1.2\n")
    code, _, err = run_cli(capsys, "--config", str(cfg), "analytic", "--gain", "1.1")
    assert code == 2


def test_output_file_matches_stdout(tmp_path, capsys):
    out_file = tmp_path / "report.txt"
    code, out, _ = run_cli(
        capsys, "analytic", "--gain", "1.1", "--output", str(out_file)
    )
    assert code == 0
    assert out_file.read_text() == out


def test_console_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "cvbell.cli", "analytic", "--gain", "1.000001"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "B = 2.82842" in proc.stdout
