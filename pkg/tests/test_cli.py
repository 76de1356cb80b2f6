import json
import math
import subprocess
import sys

import pytest

from minterp.cli import main

from conftest import INSTANCES

E1 = str(INSTANCES / "e1.json")
E3 = str(INSTANCES / "e3.json")
BAD = str(INSTANCES / "bad_triangle.json")
OP = str(INSTANCES / "line4_contraction.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_exit_codes(capsys, tmp_path):
    assert run(capsys, "validate", E1)[0] == 0
    code, out, _ = run(capsys, "validate", BAD)
    assert code == 1 and "triangle at ('x', 'y', 'z')" in out
    broken = tmp_path / "broken.json"
    broken.write_text('{"X0": [')
    assert run(capsys, "validate", str(broken))[0] == 2
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 2
    broken.write_text('{"X0": ["a"]}')
    assert run(capsys, "validate", str(broken))[0] == 2


def test_validate_json_report(capsys):
    code, out, _ = run(capsys, "validate", BAD, "--format", "json")
    doc = json.loads(out)
    assert code == 1 and not doc["ok"]
    d0 = doc["reports"][0]
    assert d0["subject"] == "d0" and d0["violations"][0]["axiom"] == "triangle"


def test_compute_km_e3(capsys):
    code, out, _ = run(capsys, "compute", E3, "--what", "km", "--t", "1.0", "--format", "json")
    doc = json.loads(out)
    pts = doc["result"]["points"]
    assert code == 0 and doc["result"]["values"][pts.index("a")][pts.index("b")] == 3.0
    code, out, _ = run(capsys, "compute", E3, "--what", "km", "--t", "1.0")
    assert code == 0 and out.splitlines()[-1].split() == ["b", "3", "2", "0"]


def test_compute_delta_e1(capsys):
    code, out, _ = run(capsys, "compute", E1, "--what", "delta", "--theta", "0.5", "--q", "inf", "--format", "json")
    vals = json.loads(out)["result"]["values"]
    assert code == 0 and 0 < vals[0][1] <= 3.0
    assert vals[0][1] == pytest.approx(2 * math.sqrt(2))


def test_compute_p_chain_and_beta_intervals(capsys):
    code, out, _ = run(capsys, "compute", E1, "--what", "p", "--format", "json")
    doc = json.loads(out)
    assert doc["result"]["chains"]["a,b"] == {"points": ["b", "a"], "start_k": -1}
    code, out, _ = run(capsys, "compute", E1, "--what", "beta", "--q", "2")
    assert code == 0 and "[" in out and "certified intervals [lo, hi]" in out
    code, out, _ = run(capsys, "compute", E1, "--what", "jm", "--t", "2")
    assert code == 0


def test_compute_usage_errors(capsys):
    assert run(capsys, "compute", E1, "--what", "p", "--theta", "1.5")[0] == 2
    assert run(capsys, "compute", E1, "--what", "p", "--q", "0.5")[0] == 2
    assert run(capsys, "compute", E1, "--what", "km", "--t", "-1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["compute", E1, "--what", "nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nope"])
    assert exc.value.code == 2


def test_verify_fixed_point_prints_label(capsys):
    code, out, _ = run(capsys, "verify", OP, "--suite", "fixed-point")
    assert code == 0 and "fixed point: v" in out


def test_verify_non_contraction_is_usage_error(capsys, tmp_path):
    doc = {"domain": "line4.json", "codomain": "line4.json", "map": {"u": "v", "v": "w", "w": "v", "z": "z"}}
    path = tmp_path / "op.json"
    path.write_text(json.dumps(doc))
    (tmp_path / "line4.json").write_text((INSTANCES / "line4.json").read_text())
    assert run(capsys, "verify", str(path), "--suite", "fixed-point")[0] == 2
    code, out, _ = run(capsys, "verify", str(path), "--suite", "all", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["summary"]["observations"]["fixed-point skipped: operator is not a contraction"] == 1


def test_verify_invalid_instance(capsys):
    assert run(capsys, "verify", BAD, "--suite", "separator")[0] == 2
    assert run(capsys, "verify", E1, "--random", "2")[0] == 2


def test_verify_random_is_deterministic(capsys, tmp_path):
    argv = ["verify", "--random", "4", "--seed", "3", "--suite", "separator", "--format", "json"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert [c["case"] for c in doc["cases"]] == [0, 1, 2, 3]
    assert "timings" not in doc
    assert main(argv + ["--out", str(b), "--timings"]) == 0
    assert "timings" in json.loads(b.read_text())


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "minterp", "validate", E1], capture_output=True, text=True)
    assert proc.returncode == 0 and "pair: ok" in proc.stdout
