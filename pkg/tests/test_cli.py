import configparser
import json
import subprocess
import sys

import pytest

from zernike_haantjes.cli import main
from zernike_haantjes.models import catalog
from zernike_haantjes.tensor import TensorField11

H2 = "p1^2 + p2^2 + g1*(q1*p1 + q2*p2) + g2*(q1*p1 + q2*p2)^2"
I2 = "(1 + g2*(q1^2 + q2^2))*p2^2 + g1*q2*p2"


def test_list(capsys):
    assert main(["list", "--format", "json"]) == 0
    names = [d["name"] for d in json.loads(capsys.readouterr().out)]
    assert len(names) >= 9
    for n in ("superintegrability", "torsion", "chain", "solver", "canonicity", "separated", "elliptic", "ode",
              "obstruction", "numeric"):
        assert n in names


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "zernike_haantjes", "list"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "obstruction" in out.stdout


@pytest.mark.parametrize("argv,code", [
    (["run", "ode"], 0),
    (["run", "--suite", "superintegrability"], 0),
    (["run", "no-such-suite"], 2),
    (["run"], 2),
    (["frobnicate"], 2),
    ([], 2),
    (["run", "elliptic", "--k1", "3/5", "--k2", "4/5"], 0),
    (["run", "elliptic", "--k1", "3/5", "--k2", "3/5"], 1),
    (["run", "superintegrability", "--gamma1", "q1 +"], 2),
])
def test_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_json_report_and_params(capsys):
    assert main(["run", "obstruction", "--N", "3", "--format", "json"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["suite"] == "obstruction"
    assert rep["params"] == {"N": "3"}
    ids = {c["id"]: c for c in rep["checks"]}
    assert ids["nonzero_witness"]["status"] == "recorded"
    assert "seconds" not in ids["linear_coefficient"]


def test_times_flag(capsys):
    assert main(["run", "ode", "--format", "json", "--times"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert all("seconds" in c for c in rep["checks"])


def test_out_directory_and_report_diff(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "chain", "--N", "2", "--out", str(a)]) == 0
    assert main(["run", "chain", "--N", "2", "--out", str(b)]) == 0
    assert (a / "chain.json").read_bytes() == (b / "chain.json").read_bytes()
    assert (a / "chain.txt").read_bytes() == (b / "chain.txt").read_bytes()
    capsys.readouterr()
    assert main(["report-diff", str(a / "chain.json"), str(b / "chain.json")]) == 0
    assert "reports agree" in capsys.readouterr().out
    c = tmp_path / "c"
    assert main(["run", "chain", "--N", "3", "--out", str(c)]) == 0
    capsys.readouterr()
    assert main(["report-diff", str(a / "chain.json"), str(c / "chain.json")]) == 1
    assert "only in b" in capsys.readouterr().out
    assert main(["report-diff", str(a / "chain.json"), str(tmp_path / "missing.json")]) == 2


def test_solve_writes_catalog_fixture(tmp_path):
    out = tmp_path / "k.ini"
    assert main(["solve", "--H", H2, "--I", I2, "--name", "K_I2", "--out", str(out)]) == 0
    cp = configparser.ConfigParser()
    cp.read_string(out.read_text())
    sec = cp["K_I2"]
    K = TensorField11.parse([sec[f"row{i}"].split("|") for i in range(1, 5)])
    assert K.equals(catalog("K_I2").tensor)


def test_solve_without_solution(capsys):
    assert main(["solve", "--H", H2, "--I", "q1"]) == 1
    out = capsys.readouterr().out
    assert "no solution" in out
    assert "dq1: 1" in out


def test_solve_bad_expression():
    assert main(["solve", "--H", "p1^^2", "--I", "q1"]) == 2
