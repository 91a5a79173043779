import json
import subprocess
import sys

import numpy as np
import pytest

from openquad import cli


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "openquad.cli", *args],
        capture_output=True,
        text=True,
    )


def write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


# ---------------------------------------------------------------- fits


def test_fit_power_law_exact():
    xs = np.array([2.0, 3.0, 5.0, 8.0, 13.0])
    ys = 4.0 * xs**-3
    expo, pref, resid = cli.fit_power_law(xs, ys)
    assert expo == pytest.approx(-3.0, abs=1e-12)
    assert pref == pytest.approx(4.0, rel=1e-12)
    assert resid == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        cli.fit_power_law([1, 2, 3], [1, 1, 1])
    with pytest.raises(ValueError):
        cli.fit_power_law(xs, -ys)


def test_fit_exponential_exact():
    ns_ = np.arange(4, 16)
    ys = 0.7 * np.exp(-1.3 * ns_)
    rate, pref, resid = cli.fit_exponential(ns_, ys)
    assert rate == pytest.approx(1.3, abs=1e-12)
    assert pref == pytest.approx(0.7, rel=1e-9)
    assert resid < 1e-12


def test_fit_karevski_recovers_synthetic():
    lams = np.array([0.05, 0.1, 0.2, 0.3, 0.45, 0.7, 1.0])
    a, b = 0.088, 0.0071
    qs = a * lams**2 / (b + lams**4)
    af, bf, resid = cli.fit_karevski(lams, qs)
    assert af == pytest.approx(a, abs=1e-6)
    assert bf == pytest.approx(b, abs=1e-6)
    assert resid < 1e-10
    with pytest.raises(ValueError):
        cli.fit_karevski(lams[:4], qs[:4])
    with pytest.raises(ValueError):
        cli.fit_karevski(lams, np.sort(qs))  # maximum at the edge


# ------------------------------------------------------------ validation


def test_invalid_configs_exit_2(tmp_path):
    cases = [
        {"task": "fly_me_to_the_moon", "model": {"n": 4}},
        {"task": "ness"},  # missing model
        {"task": "ness", "model": {"n": 1}},
        {"task": "ness", "model": {"n": 8}, "bath": {"type": "squeezed"}},
        {"task": "sweep", "model": {"n": 8}},  # missing sweep block
        {"task": "sweep", "model": {"n": 8}, "sweep": {"parameter": "bogus", "values": [1, 2]}},
        {"task": "sweep", "model": {"n": 8}, "sweep": {"parameter": "h", "values": [0.5]}},
        {"task": "oracle_check", "model": {"n": 5}},
        {"task": "ness", "model": {"n": 8}, "output": {"format": "parquet"}},
        {"task": "ness", "model": {"n": 8}, "bath": {"beta_L": -2.0}},
    ]
    for payload in cases:
        cfg = write_config(tmp_path, payload)
        proc = run_cli("run", str(cfg), "--output-dir", str(tmp_path / "out"))
        assert proc.returncode == 2, (payload, proc.stderr)
        assert proc.stderr.strip()


def test_missing_config_file_exit_2(tmp_path):
    proc = run_cli("run", str(tmp_path / "nope.json"))
    assert proc.returncode == 2


def test_numerical_failure_exit_3(tmp_path):
    # lambda = 0 leaves a purely imaginary rapidity spectrum: no unique NESS
    cfg = write_config(
        tmp_path,
        {
            "task": "ness",
            "model": {"n": 4, "gamma": 0.5, "h": 0.9},
            "bath": {"lambda": 0.0},
            "output": {"directory": str(tmp_path / "out")},
        },
    )
    proc = run_cli("run", str(cfg))
    assert proc.returncode == 3, proc.stderr
    assert "NonUniqueNESS" in proc.stderr


# ------------------------------------------------------------------ tasks


def test_ness_task_and_determinism(tmp_path):
    payload = {
        "task": "ness",
        "model": {"n": 10, "gamma": 0.5, "h": 0.9},
        "output": {"directory": str(tmp_path / "a")},
    }
    cfg = write_config(tmp_path, payload)
    proc = run_cli("run", str(cfg))
    assert proc.returncode == 0, proc.stderr
    first = (tmp_path / "a" / "ness.csv").read_bytes()
    meta = json.loads((tmp_path / "a" / "ness.meta.json").read_text())
    assert meta["config"] == payload
    assert "wall_time_s" in meta and "version" in meta

    payload["output"]["directory"] = str(tmp_path / "b")
    cfg = write_config(tmp_path, payload, "config2.json")
    assert run_cli("run", str(cfg)).returncode == 0
    second = (tmp_path / "b" / "ness.csv").read_bytes()
    assert first == second  # byte-identical reruns

    lines = first.decode().splitlines()
    assert lines[0] == "quantity,i,j,value"
    quantities = {line.split(",")[0] for line in lines[1:]}
    assert {"s_z", "C", "C_res", "Q", "H_m", "entropy_total", "qmi"} <= quantities


def test_sweep_ordering_error_rows_and_workers(tmp_path):
    payload = {
        "task": "sweep",
        "model": {"n": 8, "gamma": 0.5, "h": 0.5},
        "sweep": {"parameter": "lambda", "values": [0.2, 0.0, 0.1]},
        "output": {"directory": str(tmp_path / "w1")},
    }
    cfg = write_config(tmp_path, payload)
    assert run_cli("run", str(cfg)).returncode == 0
    rows = (tmp_path / "w1" / "sweep.csv").read_text().splitlines()
    header = rows[0].split(",")
    assert header[0] == "lambda" and header[-1] == "error"
    values = [float(r.split(",")[0]) for r in rows[1:]]
    assert values == sorted(values)  # ascending regardless of input order
    # the lambda = 0 point fails but the sweep continues
    err_row = rows[1]
    assert "NonUniqueNESS" in err_row

    payload["output"]["directory"] = str(tmp_path / "w4")
    cfg = write_config(tmp_path, payload, "c4.json")
    assert run_cli("run", str(cfg), "--workers", "3").returncode == 0
    assert (tmp_path / "w1" / "sweep.csv").read_text().splitlines()[1:] == (
        tmp_path / "w4" / "sweep.csv"
    ).read_text().splitlines()[1:]


def test_sweep_2d_grid(tmp_path):
    payload = {
        "task": "sweep",
        "model": {"n": 6, "gamma": 0.5, "h": 0.9},
        "sweep": {
            "parameter": ["beta_L", "beta_R"],
            "axis1": {"values": [0.5, 0.25]},
            "axis2": {"start": 1.0, "stop": 4.0, "count": 2, "spacing": "log"},
        },
        "output": {"directory": str(tmp_path / "g")},
    }
    cfg = write_config(tmp_path, payload)
    proc = run_cli("run", str(cfg))
    assert proc.returncode == 0, proc.stderr
    rows = (tmp_path / "g" / "sweep.csv").read_text().splitlines()
    assert rows[0].startswith("beta_L,beta_R,")
    assert len(rows) == 5
    pts = [tuple(float(x) for x in r.split(",")[:2]) for r in rows[1:]]
    assert pts == sorted(pts)


def test_gap_scaling_task(tmp_path):
    payload = {
        "task": "gap_scaling",
        "model": {"n": 16, "gamma": 0.5, "h": 0.9},
        "sizes": [8, 12, 16, 20, 24],
        "output": {"directory": str(tmp_path / "gap"), "format": "json"},
    }
    cfg = write_config(tmp_path, payload)
    proc = run_cli("run", str(cfg))
    assert proc.returncode == 0, proc.stderr
    rows = json.loads((tmp_path / "gap" / "gap_scaling.json").read_text())
    assert [r["n"] for r in rows] == [8, 12, 16, 20, 24]
    assert all(r["gap"] > 0 for r in rows)
    assert rows[0]["fit_exponent"] == rows[-1]["fit_exponent"]


def test_dynamics_task(tmp_path):
    payload = {
        "task": "dynamics",
        "model": {"n": 3, "gamma": 0.5, "h": 0.9},
        "dynamics": {"pairs": [[1, 2], [1, 2]], "t_max": 5.0, "num_times": 11},
        "output": {"directory": str(tmp_path / "dyn")},
    }
    cfg = write_config(tmp_path, payload)
    proc = run_cli("run", str(cfg))
    assert proc.returncode == 0, proc.stderr
    rows = (tmp_path / "dyn" / "dynamics.csv").read_text().splitlines()
    assert rows[0] == "t,re,im"
    assert len(rows) == 12


def test_oracle_check_task(tmp_path):
    for bath in ("redfield", "lindblad"):
        payload = {
            "task": "oracle_check",
            "model": {"n": 2, "gamma": 0.5, "h": 0.9},
            "bath": {"type": bath},
            "output": {"directory": str(tmp_path / f"oc_{bath}")},
        }
        cfg = write_config(tmp_path, payload, f"{bath}.json")
        proc = run_cli("run", str(cfg))
        assert proc.returncode == 0, proc.stderr
        rows = (tmp_path / f"oc_{bath}" / "oracle_check.csv").read_text().splitlines()
        assert rows[0] == "check,n,model,max_abs_deviation"
        devs = [float(r.split(",")[-1]) for r in rows[1:]]
        assert max(devs) <= 1e-8


def test_seed_flag_accepted(tmp_path):
    payload = {
        "task": "ness",
        "model": {"n": 6, "gamma": 0.5, "h": 0.9},
        "output": {"directory": str(tmp_path / "s")},
    }
    cfg = write_config(tmp_path, payload)
    assert run_cli("run", str(cfg), "--seed", "42").returncode == 0
