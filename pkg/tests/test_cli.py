import csv
import json
import math
import shutil
import subprocess

import pytest

from dispersive_jcm.cli import csv_text, fmt, main, sidecar_path

BASE_MODEL = {"omega_a": 1.0, "omega_b": 1.1, "Omega0": 5.0, "g_a": 0.05, "g_b": 0.05,
              "cutoff_a": 12, "cutoff_b": 12, "convention": "half"}


def write_config(tmp_path, name="run.json", model=None, **sections):
    data = {"model": {**BASE_MODEL, **(model or {})}, **sections}
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, 1e-300, -2.5e17, 0.0):
        assert float(fmt(x)) == x
    assert fmt(3) == "3" and fmt(True) == "1" and fmt("omega_b") == "omega_b"
    assert fmt(float("nan")) == "nan"


def test_validate_baseline(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["validate", "--config", str(write_config(tmp_path)), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["derived"]["eps_a"] == pytest.approx(0.0125, abs=1e-15)
    assert report["status"] == "pass"
    assert report["sw_sign"] in (1, -1)
    assert set(report["branch_plus"]) >= {"theta", "omega_A", "omega_B", "tau_eff"}
    assert "eps_a" in capsys.readouterr().out


def test_validate_resonance(tmp_path, capsys):
    assert main(["validate", "--config", str(write_config(tmp_path, model={"Omega0": 1.0}))]) == 1
    assert "reson" in capsys.readouterr().err.lower()


def test_validate_warns_on_strong_coupling(tmp_path, capsys):
    cfg = write_config(tmp_path, model={"Omega0": 2.0, "g_a": 0.5})
    assert main(["validate", "--config", str(cfg)]) == 2
    text = capsys.readouterr().out
    report = json.loads(text[text.index("{"):])
    assert report["dispersive"]["status_a"] == "warn"
    assert report["dispersive"]["status_b"] == "pass"


def test_malformed_json_reports_location(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"model": {"omega_a": 1.0,,}}')
    assert main(["validate", "--config", str(path)]) == 1
    assert f"{path}:1:" in capsys.readouterr().err


def test_bad_field_reports_path(tmp_path, capsys):
    assert main(["validate", "--config", str(write_config(tmp_path, model={"g_a": "big"}))]) == 1
    assert "model.g_a" in capsys.readouterr().err


def test_unknown_keys_warn_but_run(tmp_path, capsys):
    cfg = write_config(tmp_path, model={"colour": "blue"}, extra=1)
    assert main(["validate", "--config", str(cfg)]) == 0
    err = capsys.readouterr().err
    assert "colour" in err and "extra" in err


SWEEP = {"parameter": "omega_b", "from": 0.5, "to": 9.5, "points": 100}


def test_theta_sweep_rows_and_flags(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["theta-sweep", "--config", str(write_config(tmp_path, sweep=SWEEP)), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["param", "value", "theta_plus", "theta_minus", "omega_A_plus", "omega_B_plus",
                      "omega_A_minus", "omega_B_minus", "asymptote_flag"]
    assert len(rows) == 100
    assert all(r[0] == "omega_b" for r in rows)
    # oracle: bare sign of w_a - w_b in each branch on the same grid
    chi_a = 2 * 0.05 ** 2 / 4.0
    flagged = set()
    for col_s in (1, -1):
        prev = None
        for i, r in enumerate(rows):
            wb = float(r[1])
            chi_b = 2 * 0.05 ** 2 / (5.0 - wb)
            d = (1.0 + col_s * 0.5 * chi_a) - (wb + col_s * 0.5 * chi_b)
            if prev is not None and prev[1] * d < 0:
                flagged |= {prev[0], i}
            prev = (i, d)
    assert {i for i, r in enumerate(rows) if r[-1] == "1"} == flagged
    assert len(flagged) == 2


def test_theta_sweep_uncoupled_mode_a(tmp_path):
    out = tmp_path / "sweep.csv"
    cfg = write_config(tmp_path, model={"g_a": 0.0}, sweep={**SWEEP, "points": 10})
    assert main(["theta-sweep", "--config", str(cfg), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert all(float(r[2]) == 0 and float(r[3]) == 0 for r in rows)


def test_theta_sweep_needs_sweep(tmp_path, capsys):
    assert main(["theta-sweep", "--config", str(write_config(tmp_path))]) == 1
    assert "sweep" in capsys.readouterr().err


FOCK = {"fock": {"n_a": 1, "n_b": 0}, "atom": "plus"}


def test_evolve_closed_only(tmp_path):
    out = tmp_path / "evolve.csv"
    cfg = write_config(tmp_path, initial_state=FOCK, evolution={"t_max": 250.0, "points": 501})
    assert main(["evolve", "--config", str(cfg), "--out", str(out), "--backends", "closed"]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "na_closed", "nb_closed"]
    assert float(rows[0][1]) == 1.0 and float(rows[0][2]) == 0.0
    totals = [float(r[1]) + float(r[2]) for r in rows]
    assert max(totals) - min(totals) < 1e-9
    meta = json.loads(sidecar_path(out).read_text())
    assert meta["backends"] == ["closed"]
    assert meta["max_deviation_na_full_vs_closed"] is None
    assert meta["tau_eff"] > 0


def test_evolve_full_deviation_bound(tmp_path):
    out = tmp_path / "evolve.csv"
    tau = 1 / 0.1000048  # rough, refined from the sidecar below
    cfg = write_config(tmp_path, initial_state=FOCK, evolution={"t_max": 2 * math.pi * tau, "points": 400})
    assert main(["evolve", "--config", str(cfg), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["t", "na_full", "nb_full", "na_eff", "nb_eff", "na_closed", "nb_closed"]
    meta = json.loads(sidecar_path(out).read_text())
    assert float(rows[-1][0]) >= 2 * math.pi * meta["tau_eff"] * 0.999
    eps = 0.05 / 4.0
    assert meta["max_deviation_na_full_vs_closed"] < 10 * eps * 1
    assert meta["uniform_grid"] is True


def test_evolve_truncation_error(tmp_path, capsys):
    state = {"coherent": {"alpha": [5.0, 0.0], "beta": [0.0, 0.0]}, "atom": "plus"}
    cfg = write_config(tmp_path, initial_state=state, evolution={"t_max": 10.0, "points": 5})
    out = tmp_path / "evolve.csv"
    assert main(["evolve", "--config", str(cfg), "--out", str(out)]) == 1
    err = capsys.readouterr().err
    assert "cutoff" in err and any(ch.isdigit() for ch in err)
    assert not out.exists()


def test_evolve_bad_backend(tmp_path):
    cfg = write_config(tmp_path, initial_state=FOCK, evolution={"t_max": 1.0, "points": 3})
    assert main(["evolve", "--config", str(cfg), "--backends", "fast"]) == 1


def test_sw_residual(tmp_path):
    out = tmp_path / "res.csv"
    cfg = write_config(tmp_path, model={"cutoff_a": 4, "cutoff_b": 4})
    assert main(["sw-residual", "--config", str(cfg), "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["scale", "eps_max", "residual_first_order", "residual_exact_blockdiag"]
    assert [float(r[0]) for r in rows] == [1.0, 0.5, 0.25, 0.125]
    meta = json.loads(sidecar_path(out).read_text())
    assert 1.9 <= meta["slope"] <= 2.1
    assert float(rows[1][3]) < float(rows[0][3])


def test_sw_residual_uncoupled(tmp_path):
    out = tmp_path / "res.csv"
    cfg = write_config(tmp_path, model={"g_a": 0.0, "g_b": 0.0, "cutoff_a": 3, "cutoff_b": 3})
    assert main(["sw-residual", "--config", str(cfg), "--out", str(out)]) == 0
    _, rows = read_csv(out)
    assert all(float(v) == 0 for r in rows for v in r[2:])
    meta = json.loads(sidecar_path(out).read_text())
    assert meta["slope"] is None and meta["slope_defined"] is False


def test_deterministic_output(tmp_path):
    cfg = write_config(tmp_path, model={"cutoff_a": 4, "cutoff_b": 4}, initial_state=FOCK,
                       evolution={"t_max": 50.0, "points": 51}, sweep={**SWEEP, "points": 20})
    for cmd in ("theta-sweep", "evolve", "sw-residual"):
        first, second = tmp_path / f"{cmd}1.csv", tmp_path / f"{cmd}2.csv"
        assert main([cmd, "--config", str(cfg), "--out", str(first)]) == 0
        assert main([cmd, "--config", str(cfg), "--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()
        assert b"\r" not in first.read_bytes()
        header, rows = read_csv(first)
        assert csv_text(header, [[_parse(v) for v in r] for r in rows]) == first.read_text()


def _parse(text):
    for kind in (int, float):
        try:
            return kind(text)
        except ValueError:
            pass
    return text


@pytest.mark.skipif(shutil.which("jcm") is None, reason="console script not installed")
def test_console_script(tmp_path):
    cfg = write_config(tmp_path, model={"cutoff_a": 3, "cutoff_b": 3})
    proc = subprocess.run(["jcm", "validate", "--config", str(cfg)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "calibrated generator sign" in proc.stdout
