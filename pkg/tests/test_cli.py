import json
import math
import subprocess
import sys

import pytest

from nhfloquet.cli import UsageError, parse_angle, parse_config, run


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 1
    return code, json.loads(lines[0])


def test_parse_config_flags():
    cfg = parse_config(["verify", "--t1", "10", "--gamma0", "0.1", "--omega1", "1", "--cells", "200"])
    p = cfg.params()
    assert (cfg.subcommand, p.t1, p.gamma0, p.omega1, cfg.cells) == ("verify", 10.0, 0.1, 1.0, 200)
    assert cfg.epsilon_e == 1e-2 and cfg.samples == 4096


@pytest.mark.parametrize("text, value", [("pi/2", math.pi / 2), ("5pi/12", 5 * math.pi / 12),
                                         ("2*pi", 2 * math.pi), ("1.25", 1.25), ("-pi", -math.pi)])
def test_parse_angle(text, value):
    assert parse_angle(text) == pytest.approx(value)


def test_empty_argv_is_usage_error():
    with pytest.raises(UsageError):
        parse_config([])


def test_config_file_precedence(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"t1": 3.0, "omega1": 2.0, "workers": 2, "theta": "pi/2"}))
    monkeypatch.setenv("FLOQUET_WORKERS", "5")
    cfg = parse_config(["invariants", "--config", str(path), "--t1", "4"])
    assert cfg.t1 == 4.0 and cfg.omega1 == 2.0 and cfg.workers == 2
    assert cfg.theta == pytest.approx(math.pi / 2)
    assert parse_config(["invariants"]).workers == 5


def test_config_unknown_field(tmp_path):
    path = tmp_path / "c.json"
    path.write_text('{"nope": 1}')
    with pytest.raises(UsageError):
        parse_config(["invariants", "--config", str(path)])


def test_verify_fig1d(capsys):
    code, out = call(capsys, "verify", "--t1", "10", "--gamma0", "0.1", "--omega1", "1", "--cells", "200")
    assert code == 0
    assert {k: out[k] for k in ("n0", "npi", "W0_abs", "Wpi_abs")} == {
        "n0": 3, "npi": 4, "W0_abs": 3, "Wpi_abs": 4}
    assert out["pass"] is True


def test_invariants_trivial(capsys):
    code, out = call(capsys, "invariants", "--mu", "0.3")
    assert code == 0 and (out["W0"], out["Wpi"]) == (0, 0)


def test_spectrum_csv(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out = call(capsys, "spectrum", "--t1", "10", "--gamma0", "0.1", "--omega1", "1",
                     "--cells", "20", "--out-csv", str(path))
    assert code == 0 and len(out["energies"]) == 40
    assert path.read_text().startswith("index,re_E,im_E,class\n")


def test_edges(capsys):
    code, out = call(capsys, "edges", "--t1", "10", "--gamma0", "0.1", "--omega1", "1", "--cells", "60")
    assert code == 0 and len(out["edge_weight"]) == 2 * (out["n0"] + out["npi"])


def test_sweep_preset_outputs(capsys, tmp_path):
    csv_path, ppm_path = tmp_path / "d.csv", tmp_path / "d.ppm"
    code, out = call(capsys, "sweep", "--preset", "fig2c", "--grid", "4", "--samples", "512",
                     "--target", "W0", "--out-csv", str(csv_path), "--out-ppm", str(ppm_path))
    assert code == 0
    assert sum(out["cells"].values()) == 16
    assert ppm_path.read_bytes().startswith(b"P6\n4 4\n255\n")
    assert len(csv_path.read_text().splitlines()) == 17


def test_sweep_custom_axes(capsys):
    code, out = call(capsys, "sweep", "--x", "t1:(0:4:3", "--y", "omega1:(0:9:3",
                     "--bind", "gamma=0.75i*t1", "--t2", "0.01", "--omega2", "0.01", "--samples", "512")
    assert code == 0 and out["spec"]["bindings"] == ["gamma=(0.0+0.75i)*t1"]


def test_gap_closure_exit_1(capsys):
    code, out = call(capsys, "invariants", "--t1", "0.1", "--gamma0", "0.1", "--omega1", "1")
    assert code == 1 and out["error"] == "GapClosure" and out["k"] == 0.0


@pytest.mark.parametrize("argv", [["bogus"], ["invariants", "--t1", "x"], ["invariants", "--gamma0", "-1"],
                                  ["sweep", "--x", "t1:0"], ["sweep", "--x", "t1:0:1", "--bind", "q=1*t1"]])
def test_bad_input_exit_2(capsys, argv):
    code, out = call(capsys, *argv)
    assert code == 2 and "error" in out


def test_module_subprocess_stdout_is_json():
    r = subprocess.run([sys.executable, "-m", "nhfloquet", "invariants", "--t1", "10",
                        "--gamma0", "0.1", "--omega1", "1"], capture_output=True, text=True)
    assert r.returncode == 0
    out = json.loads(r.stdout)
    assert abs(out["W0"]) == 3 and abs(out["Wpi"]) == 4
    r = subprocess.run([sys.executable, "-m", "nhfloquet"], capture_output=True, text=True)
    assert r.returncode == 2 and "usage" in r.stderr
