import csv
import json
import os
import shutil
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("RISSK_CLI") or shutil.which("rissk")
pytestmark = pytest.mark.skipif(not CLI, reason="rissk CLI not available")

COLUMNS = ["snr_db", "value", "std_error", "method", "label"]
BASE = ["-N", "64", "-k", "0.1", "-e", "fixed:0.1"]


def run(args, env=None, cwd=None):
    full_env = dict(os.environ)
    full_env.pop("RISSK_OUTPUT_DIR", None)
    full_env.update(env or {})
    return subprocess.run([CLI, *args], capture_output=True, text=True, env=full_env, cwd=cwd, timeout=300)


def read_rows(path):
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, list(reader)


def check_schema(path):
    header, rows = read_rows(path)
    assert header == COLUMNS
    assert rows
    for r in rows:
        assert len(r) == 5
        float(r[0])
        if r[1]:
            float(r[1])
        assert float(r[2]) >= 0.0
        assert r[3]
    return rows


def test_abep_success(tmp_path):
    res = run(["abep", *BASE, "--snr", "-20:-10:5", "-m", "exact,gcq,upper", "-o", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    rows = check_schema(tmp_path / "abep.csv")
    assert len(rows) == 9
    assert {r[3] for r in rows} == {"exact", "gcq", "upper"}
    manifest = json.loads((tmp_path / "abep.manifest.json").read_text())
    assert manifest["tool"] == "rissk"


def test_output_dir_from_environment(tmp_path):
    out = tmp_path / "env-out"
    res = run(["outage", *BASE, "--snr", "-40,-30", "--rate", "3", "--name", "o"], env={"RISSK_OUTPUT_DIR": str(out)},
              cwd=tmp_path)
    assert res.returncode == 0, res.stderr
    check_schema(out / "o.csv")
    assert (out / "o.manifest.json").exists()
    assert not (tmp_path / "o.csv").exists()


def test_explicit_out_dir_wins(tmp_path):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    res = run(["throughput", *BASE, "--snr", "0", "-o", str(flag_dir)], env={"RISSK_OUTPUT_DIR": str(env_dir)})
    assert res.returncode == 0, res.stderr
    check_schema(flag_dir / "throughput.csv")
    assert not env_dir.exists()


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_elements": 100, "li_level": 0.1, "err_mode": "fixed:0.1",
                               "snr_grid_db": [-25, -23], "methods": ["exact"]}))
    res = run(["abep", "--config", str(cfg), "-o", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    assert len(check_schema(tmp_path / "abep.csv")) == 2
    res = run(["abep", "--config", str(cfg), "--snr", "-21", "-o", str(tmp_path)])
    assert res.returncode == 0
    assert [float(r[0]) for r in check_schema(tmp_path / "abep.csv")] == [-21.0]


def test_figure_preset(tmp_path):
    res = run(["figure", "fig3a", "-o", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    check_schema(tmp_path / "fig3a.csv")
    manifest = json.loads((tmp_path / "fig3a.manifest.json").read_text())
    assert manifest["preset"] == "fig3a"


@pytest.mark.parametrize(
    "args",
    [
        ["abep", "-N", "0", "-k", "0.1", "-e", "perfect", "--snr", "0"],
        ["abep", *BASE, "--snr", "5:1:1"],
        ["abep", *BASE, "--snr", "0", "-e", "sometimes"],
        ["figure", "fig99"],
        ["abep", "--no-such-flag"],
    ],
)
def test_config_errors_exit_2(tmp_path, args):
    res = run([*args, "-o", str(tmp_path)])
    assert res.returncode == 2, res.stderr


def test_bad_config_file_exit_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run(["abep", "--config", str(cfg), "-o", str(tmp_path)]).returncode == 2
    cfg.write_text(json.dumps({"unknown_key": 1}))
    assert run(["abep", "--config", str(cfg), "-o", str(tmp_path)]).returncode == 2


def test_numerical_failure_exit_3(tmp_path):
    # rho overflows to infinity, so the integrand is not finite
    res = run(["abep", *BASE, "--snr", "3100", "-o", str(tmp_path)])
    assert res.returncode == 3
    assert "numerical failure" in res.stderr


def test_audit_and_verify_gcq(tmp_path):
    res = run(["audit-moments", "-N", "64", "--samples", "20000", "-o", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    audit = json.loads((tmp_path / "audit-moments.json").read_text())
    assert audit["audit"]
    res = run(["verify-gcq", "-N", "100", "-k", "0.1", "-e", "fixed:0.1", "--snr", "-25,-23,-21", "--max-order", "20",
               "-o", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    rows = check_schema(tmp_path / "verify-gcq.csv")
    assert len(rows) == 3 * 21
