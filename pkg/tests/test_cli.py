import json
import math
import subprocess
import sys

import numpy as np
import pytest

import oracles
from spectral_balls import runner
from spectral_balls.cli import main

DISK_JSON = '{"type":"pball","p":2,"axes":[1,1]}'
SQUARE_JSON = '{"type":"pball","p":"inf","axes":[1,1]}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eig_disk(capsys):
    code, out, _ = run(capsys, "eig", "--body", DISK_JSON, "--h0", "0.0625", "--levels", "3")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(oracles.DISK, rel=1e-4)


def test_eig_square_fixture(capsys, tmp_path):
    fx = tmp_path / "fx.json"
    fx.write_text(json.dumps({"schema_version": 1, "fixtures": {"square": json.loads(SQUARE_JSON)}}))
    code, out, _ = run(capsys, "eig", "--fixture", str(fx), "--body", "square")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(oracles.SQUARE, rel=1e-4)


@pytest.mark.parametrize("argv", [
    ["eig", "--body", "{oops"],
    ["eig", "--body", '{"type":"pball","p":0.5,"axes":[1,1]}'],
    ["eig"],
    ["frobnicate"],
    ["exit-sim", "--body", DISK_JSON],  # seed missing
])
def test_usage_errors_exit_3(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_exit_sim_thin_tail_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "exit-sim", "--body", DISK_JSON, "--paths", "10", "--seed", "1",
                       "--out", str(tmp_path / "s.csv"))
    assert code == 2 and "tail" in err


def test_exit_sim_writes_csv(capsys, tmp_path):
    path = tmp_path / "s.csv"
    code, out, _ = run(capsys, "exit-sim", "--body", SQUARE_JSON, "--paths", "20000", "--dt", "1e-3",
                       "--seed", "7", "--out", str(path))
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(oracles.SQUARE, rel=0.05)
    assert path.read_text().startswith("t,S,stderr")


def test_exit_sim_replay_exact(capsys, tmp_path):
    t = np.linspace(0, 3, 301)
    path = tmp_path / "exp.csv"
    rows = ["t,S,stderr"] + [f"{float(a)!r},{math.exp(-3 * a)!r},0.0" for a in t]
    path.write_text("\n".join(rows) + "\n")
    code, out, _ = run(capsys, "exit-sim", "--replay", str(path))
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(3.0, abs=1e-9)


def _config(tmp_path, checks, **extra):
    doc = {"schema_version": 1, "seed": 3, "checks": checks, **extra}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def test_check_writes_run_directory(capsys, tmp_path):
    cfg = _config(tmp_path, [{"id": "k", "check": "kac", "params": {"region": json.loads(DISK_JSON),
                                                                      "mc": {"dt": 1e-3, "n_paths": 5000}}},
                             {"id": "s", "check": "subadditivity",
                              "params": {"B1": json.loads(DISK_JSON), "B2": json.loads(SQUARE_JSON)}}])
    code, out, _ = run(capsys, "check", str(cfg), "--out", str(tmp_path / "runs"))
    report = json.loads(out)
    assert code == report["summary"]["exit_code"]
    assert set(report["checks"]) == {"k", "s"}
    run_dirs = list((tmp_path / "runs").iterdir())
    assert len(run_dirs) == 1 and run_dirs[0].name == f"3-{report['config_hash']}"
    csv = run_dirs[0] / report["checks"]["k"]["attachments"]["curve"]
    assert csv.read_text().startswith("t,S,stderr")
    runner.validate_report(json.loads((run_dirs[0] / "report.json").read_text()))
    code, table, _ = run(capsys, "report", str(run_dirs[0] / "report.json"))
    assert code == 0 and "subadditivity" in table


def test_check_rejects_unknown_check_type(capsys, tmp_path):
    cfg = _config(tmp_path, [{"id": "x", "check": "frobnicate", "params": {}}])
    assert run(capsys, "check", str(cfg), "--out", str(tmp_path))[0] == 3


def test_check_requires_seed_for_monte_carlo(capsys, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"schema_version": 1, "checks": [
        {"id": "k", "check": "kac", "params": {"region": json.loads(DISK_JSON)}}]}))
    assert run(capsys, "check", str(path), "--out", str(tmp_path))[0] == 3


def test_check_unknown_fixture_name(capsys, tmp_path):
    cfg = _config(tmp_path, [{"id": "m", "check": "monotonicity",
                              "params": {"omega1": "nope", "omega2": "disk"}}])
    assert run(capsys, "check", str(cfg), "--out", str(tmp_path))[0] == 3


def test_check_monotonicity_without_inclusion_exit_3(capsys, tmp_path):
    cfg = _config(tmp_path, [{"id": "m", "check": "monotonicity",
                              "params": {"omega1": json.loads(SQUARE_JSON), "omega2": json.loads(DISK_JSON)}}])
    code, out, err = run(capsys, "check", str(cfg), "--out", str(tmp_path))
    assert code == 3
    assert "InclusionNotEstablished" in json.loads(out)["errors"]["m"]


def test_check_coarse_resolution_exit_2(capsys, tmp_path):
    near = {"type": "pball", "p": 2, "axes": [1.002, 1.002]}
    checks = [{"id": "m", "check": "monotonicity", "params": {"omega1": json.loads(DISK_JSON), "omega2": near}}]
    cfg = _config(tmp_path, checks)
    code, out, _ = run(capsys, "check", str(cfg), "--h0", "0.5", "--out", str(tmp_path))
    assert code == 2
    assert json.loads(out)["checks"]["m"]["verdict"]["status"] == "Inconclusive"
    code, out, _ = run(capsys, "check", str(cfg), "--out", str(tmp_path))
    assert code == 0


def test_check_subset_and_unknown_id(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "--checks", "homogeneity/square", "--out", str(tmp_path))
    assert code == 0 and list(json.loads(out)["checks"]) == ["homogeneity/square"]
    assert run(capsys, "check", "--checks", "no/such", "--out", str(tmp_path))[0] == 3


def test_scan_translations(capsys):
    code, out, _ = run(capsys, "scan-translations", "--pair", f"[{SQUARE_JSON},{DISK_JSON}]",
                       "--offsets", "[[0,0],[0.2,0.1]]")
    assert code == 0
    assert json.loads(out)["verdict"]["status"] == "Holds"


def test_config_hash_ignores_order_of_keys(tmp_path):
    a = runner.parse_config({"schema_version": 1, "seed": 1, "checks": [
        {"id": "h", "check": "homogeneity", "params": {"omega": json.loads(DISK_JSON), "c": 2}}]})
    b = runner.parse_config(json.loads(json.dumps({"checks": [
        {"params": {"c": 2, "omega": json.loads(DISK_JSON)}, "check": "homogeneity", "id": "h"}],
        "seed": 1, "schema_version": 1})))
    assert a.config_hash() == b.config_hash()


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "spectral_balls.cli", "eig", "--body", "{"],
                         capture_output=True, text=True)
    assert out.returncode == 3
