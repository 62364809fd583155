import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import perturb_member
from racah_frames.cli import main
from racah_frames.io import read_family, write_json


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_wigner_3jm(capsys):
    code, out, _ = run(capsys, "wigner", "3jm", "--j1", "1", "--j2", "1", "--j3", "0", "--m1", "1", "--m2", "-1", "--m3", "0")
    assert code == 0
    assert out.splitlines()[0] == "+sqrt(1/3)"
    assert "square    1/3" in out
    assert "0.57735026918962" in out


def test_wigner_6j(capsys):
    code, out, _ = run(capsys, "wigner", "6j", "--j1", "1", "--j2", "1", "--j3", "0", "--j4", "1", "--j5", "1", "--j6", "1")
    assert code == 0 and out.splitlines()[0] == "-1/3"


def test_wigner_half_integers_and_zero(capsys):
    code, out, _ = run(capsys, "wigner", "3jm", "--j1", "1/2", "--j2", "1/2", "--j3", "1", "--m1", "1/2", "--m2", "1/2", "--m3", "-1")
    assert code == 0 and out.startswith("-sqrt(1/3)")
    code, out, _ = run(capsys, "wigner", "3jm", "--j1", "1", "--j2", "1", "--j3", "0", "--m1", "1", "--m2", "0", "--m3", "0")
    assert code == 0 and out.splitlines()[0] == "0"


def test_wigner_parity_error(capsys):
    code, _, err = run(capsys, "wigner", "3jm", "--j1", "1", "--j2", "1", "--j3", "0", "--m1", "1/2", "--m2", "-1", "--m3", "0")
    assert code == 2 and "non-integer" in err


def test_usage_errors(capsys):
    assert run(capsys, "wigner", "3jm", "--j1", "x", "--j2", "1", "--j3", "0", "--m1", "1", "--m2", "-1", "--m3", "0")[0] == 2
    assert run(capsys)[0] == 2
    assert run(capsys, "sic", "verify", "/nonexistent/file.json")[0] == 2


def test_identities(capsys):
    code, out, _ = run(capsys, "identities", "--max-two-j", "0")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out, _ = run(capsys, "identities", "--max-two-j", "4")
    report = json.loads(out)
    assert code == 0 and all(c["pass"] for c in report["checks"])
    assert {"command", "wall_time_seconds", "title"} <= set(report)
    assert all("relation" in c for c in report["checks"])


def test_identities_sign_flip(capsys):
    code, out, _ = run(capsys, "identities", "--max-two-j", "2", "--inject-sign-flip")
    assert code == 1
    failing = [c for c in json.loads(out)["checks"] if not c["pass"]]
    assert [c["name"] for c in failing] == ["orthogonality_mm"]
    assert failing[0]["where"] is not None


def test_tensor_dump(capsys):
    code, out, _ = run(capsys, "tensor", "dump", "--two-j", "1", "--k", "1", "--q", "1")
    obj = json.loads(out)
    assert code == 0
    (t,) = obj["tensors"]
    assert (t["k"], t["q"], t["i"]) == (1, 1, 4)
    assert t["matrix"][0][1] == pytest.approx([-(1 / 3) ** 0.5, 0.0])
    code, out, _ = run(capsys, "tensor", "dump", "--two-j", "2")
    assert len(json.loads(out)["tensors"]) == 9


def test_mub_end_to_end(tmp_path, capsys):
    f = tmp_path / "m5.json"
    assert run(capsys, "mub", "build", "-d", "5", "--out", str(f))[0] == 0
    code, out, _ = run(capsys, "mub", "verify", str(f))
    assert code == 0
    report = json.loads(out)
    assert report["pass"] and len(report["gram_spectrum"]) == 30
    code, out, _ = run(capsys, "mub", "coeffs", str(f))
    obj = json.loads(out)
    assert code == 0 and obj["metadata"]["closed_form_max_deviation"] < 1e-12
    assert len(obj["members"][0]["coefficients"]) == 25


def test_mub_non_prime(capsys):
    code, _, err = run(capsys, "mub", "build", "-d", "6")
    assert code == 2 and "d must be prime" in err


def test_sic_end_to_end(tmp_path, capsys):
    f = tmp_path / "s3.json"
    assert run(capsys, "sic", "search", "-d", "3", "--seed", "42", "--out", str(f))[0] == 0
    code, out, _ = run(capsys, "sic", "verify", str(f))
    assert code == 0
    fam = read_family(f)
    assert fam.metadata["residual"] < 1e-8
    assert len(fam.metadata["fiducial"]) == 3
    assert run(capsys, "frame", "check", str(f))[0] == 0
    code, out, _ = run(capsys, "sic", "coeffs", str(f))
    assert code == 0 and len(json.loads(out)["members"]) == 9


def test_sic_non_convergence_exit(tmp_path, capsys):
    f = tmp_path / "s.json"
    code, _, err = run(capsys, "sic", "search", "-d", "4", "--restarts", "1", "--max-iterations", "1", "--out", str(f))
    assert code == 1 and "NOT converged" in err
    assert read_family(f).metadata["converged"] is False


def test_sic_free_mode(tmp_path, capsys):
    f = tmp_path / "s.json"
    assert run(capsys, "sic", "search", "-d", "2", "--free", "--restarts", "3", "--out", str(f))[0] == 0
    assert read_family(f).metadata["provenance"]["config"]["mode"] == "free"


def test_search_output_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "sic", "search", "-d", "3", "--seed", "42", "--out", str(a))
    run(capsys, "sic", "search", "-d", "3", "--seed", "42", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_perturbed_files_fail(tmp_path, capsys):
    m = tmp_path / "m.json"
    run(capsys, "mub", "build", "-d", "3", "--out", str(m))
    fam = read_family(m)
    states = perturb_member(np.array([x.state for x in fam.members]), 2)
    for member, s in zip(fam.members, states):
        member.state = s
    bad = tmp_path / "bad.json"
    write_json(bad, fam)
    code, out, _ = run(capsys, "mub", "verify", str(bad))
    assert code == 1
    assert not json.loads(out)["pass"]
    assert run(capsys, "frame", "check", str(bad))[0] == 1


def test_generic_family(tmp_path, capsys):
    f = tmp_path / "g.json"
    basis = {"schema_version": 1, "kind": "generic", "two_j": 1, "metadata": {},
             "members": [{"label": i, "state": [[float(i == j), 0.0] for j in range(2)]} for i in range(2)]}
    f.write_text(json.dumps(basis))
    code, out, _ = run(capsys, "frame", "check", str(f))
    report = json.loads(out)
    # two basis projectors are valid pure states but cannot span all operators
    assert code == 1
    assert [c["name"] for c in report["checks"] if not c["pass"]] == ["informational_completeness"]


def test_schema_error_exit(tmp_path, capsys):
    f = tmp_path / "x.json"
    f.write_text(json.dumps({"schema_version": 9, "kind": "sic", "two_j": 1, "members": []}))
    assert run(capsys, "frame", "check", str(f))[0] == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "racah_frames", "wigner", "6j", "--j1", "1", "--j2", "1", "--j3", "2", "--j4", "1", "--j5", "1", "--j6", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.startswith("1/6")


def test_identities_float_mode(capsys):
    code, out, _ = run(capsys, "identities", "--max-two-j", "6", "--mode", "float")
    report = json.loads(out)
    assert code == 0 and report["title"].startswith("float")
    assert report["checks"][0]["tolerance"] == 1e-12
    assert run(capsys, "identities", "--max-two-j", "2", "--mode", "float", "--inject-sign-flip")[0] == 1
