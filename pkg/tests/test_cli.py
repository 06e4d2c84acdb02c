import json
import subprocess
import sys

import numpy as np
import pytest

from ghmkit.cli import main


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bt_prints_minus_one_one(capsys):
    code, out, _ = run_cli(["ghm", "bt", "--r", "0"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload == {"M": -1, "B": 1, "R": 0}


def test_classify_json(capsys):
    code, out, _ = run_cli(["classify", "--multipliers", "0.5,2"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["unstable_index"] == 1
    assert payload["dissipative"] is False
    assert payload["tatjer_case"] == "NotApplicable"


def test_classify_non_hyperbolic_exits_2(capsys):
    code, out, err = run_cli(["classify", "--multipliers", "1"], capsys)
    assert code == 2
    assert "NonHyperbolic" in err


def test_orbit_csv(tmp_path, capsys):
    path = tmp_path / "orbit.csv"
    code, _, _ = run_cli(["ghm", "orbit", "--m", "1.4", "--b", "-0.3",
                          "--x0", "0", "--y0", "0", "--n", "10",
                          "--transient", "5", "--out", str(path)], capsys)
    assert code == 0
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "i,x,y"
    assert len(lines) == 11


def test_sweep_2x2_rows(tmp_path, capsys):
    path = tmp_path / "sweep.csv"
    code, _, _ = run_cli(
        ["bif", "sweep", "--r", "0", "--m-range", "0.0,0.1",
         "--b-range", "0.2,0.3", "--nm", "2", "--nb", "2",
         "--transient", "500", "--measure", "200", "--out", str(path)],
        capsys)
    assert code == 0
    lines = path.read_text().strip().split("\n")
    assert lines[0] == "M,B,label,lyap1,lyap2,rot"
    assert len(lines) == 5


def test_fold_csv(tmp_path, capsys):
    path = tmp_path / "fold.csv"
    code, _, _ = run_cli(["bif", "fold", "--r", "0", "--range", "0.8,1.2",
                          "--step", "0.05", "--out", str(path)], capsys)
    assert code == 0
    rows = np.loadtxt(str(path), delimiter=",", skiprows=1)
    assert np.max(np.abs(rows[:, 0] + (1 + rows[:, 1]) ** 2 / 4)) < 1e-8


def test_repeated_runs_byte_identical(tmp_path, capsys):
    args = ["ghm", "orbit", "--m", "1.4", "--b", "-0.3", "--n", "200",
            "--transient", "50", "--seed", "7"]
    p1 = tmp_path / "a.csv"
    p2 = tmp_path / "b.csv"
    assert main(args + ["--out", str(p1)]) == 0
    assert main(args + ["--out", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_config_equivalent_to_flags(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m": 1.4, "b": -0.3, "n": 100,
                               "transient": 10}))
    out_flags = tmp_path / "flags.csv"
    out_cfg = tmp_path / "cfg.csv"
    assert main(["ghm", "orbit", "--m", "1.4", "--b", "-0.3", "--n", "100",
                 "--transient", "10", "--out", str(out_flags)]) == 0
    assert main(["--config", str(cfg), "ghm", "orbit", "--m", "0", "--b",
                 "0", "--out", str(out_cfg)]) == 0
    # config values override unset/defaulted values; explicit flags would win
    assert main(["--config", str(cfg), "ghm", "orbit", "--m", "1.4",
                 "--b", "-0.3", "--out", str(out_cfg)]) == 0
    assert out_flags.read_bytes() == out_cfg.read_bytes()


def test_config_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"nonsense": 1}))
    code, _, err = run_cli(["--config", str(cfg), "ghm", "bt", "--r", "0"],
                           capsys)
    assert code == 2
    assert "unknown config key" in err


def test_historic_roundtrip(tmp_path, capsys):
    orbit_path = tmp_path / "orbit.csv"
    assert main(["ghm", "orbit", "--m", "0", "--b", "0.3", "--x0", "0.05",
                 "--y0", "0", "--n", "2000", "--out", str(orbit_path)]) == 0
    code, out, _ = run_cli(["historic", "--input", str(orbit_path),
                            "--observable", "x", "--tail", "0.5"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["verdict"] == "ConvergentLike"


def test_wander_ghm_map(capsys):
    code, out, _ = run_cli(["wander", "--map", "ghm:0,0.3,0",
                            "--center", "0.02,0.0", "--radius", "0.01",
                            "--n", "40"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["contractive"] is True


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ghmkit.cli", "ghm", "bt",
                           "--r", "0.1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "-0.99773" in proc.stdout
