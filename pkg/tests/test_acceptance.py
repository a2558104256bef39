"""The twelve acceptance criteria, each at its stated tolerance and time limit.

One pass/fail line per criterion is printed in the pytest terminal summary.
Run directly with ``python tests/test_acceptance.py``.
"""

import os
import subprocess
import sys
import tempfile
import time

import pytest

from conftest import ACCEPTANCE_LINES
from zernike_haantjes.report import PASS, RECORDED
from zernike_haantjes.suites import run_suite


def _record(number, title, ok, seconds, limit, note=""):
    verdict = "PASS" if ok else "FAIL"
    bound = "no limit" if limit is None else f"limit {limit} s"
    line = f"[{verdict}] {number:2d}. {title}: {seconds:.2f} s ({bound})"
    if note:
        line += f"; {note}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def _criterion(number, title, limit, suite, params=None, extra=None):
    start = time.perf_counter()
    rep = run_suite(suite, params or {})
    seconds = time.perf_counter() - start
    problems = [f"{c.ident}: {c.residual}" for c in rep.failures()]
    if extra is not None:
        problems += extra(rep)
    ok = not problems and seconds < limit
    _record(number, title, ok, seconds, limit,
            f"{len(rep.checks)} checks" + (f", failing: {problems[:3]}" if problems else ""))
    assert not problems, problems
    assert seconds < limit
    return rep


def _require(*idents):
    def check(rep):
        have = {c.ident: c for c in rep.checks}
        out = [f"missing check {i}" for i in idents if i not in have]
        out += [f"{i} not passed" for i in idents if i in have and have[i].status != PASS]
        return out
    return check


def test_01_superintegrability():
    _criterion(1, "superintegrability", 5, "superintegrability",
               extra=_require("commutes_J", "commutes_I1", "commutes_I2", "dependence"))


def test_02_symmetry_algebra():
    _criterion(2, "symmetry algebra", 10, "symmetry-algebra",
               extra=_require("bracket_X1_X2", "bracket_X3_X1", "bracket_X2_X3", "casimir", "half_gradient",
                              "oscillator_pullback", "oscillator_algebra", "oscillator_casimir"))


def test_03_torsion():
    def extra(rep):
        need = ["haantjes.K_J2", "haantjes.K_I2", "haantjes.K_I1", "haantjes.K_e",
                "nijenhuis.N_I2", "nijenhuis.N_I1"]
        out = _require(*need)(rep)
        agree = [c for c in rep.checks if c.ident.startswith("formulas_agree")]
        if len(agree) < 5:
            out.append(f"only {len(agree)} random tensor fields compared")
        return out
    _criterion(3, "torsion", 60, "torsion", {"samples": 5}, extra)


def test_04_chain():
    def extra(rep):
        return _require(*[f"K_J2.N{n}" for n in range(1, 6)])(rep)
    _criterion(4, "chain", 30, "chain", {"N": 5}, extra)


def test_05_solver():
    _criterion(5, "solver reproduction", 120, "solver", {"deg": 2, "N": 5},
               extra=_require("I2.contains", "I2.haantjes_members", "J2.N2.haantjes_members",
                              "J2.N5.haantjes_members", "J2_half_target", "Ie.contains", "Ie.haantjes_members"))


def test_06_canonicity():
    def extra(rep):
        out = []
        for name in ("polar", "cartesian_I2", "cartesian_I1", "elliptic", "oscillator_N1"):
            n = sum(1 for c in rep.checks if c.ident.startswith(f"{name}.") and c.status == PASS)
            if n != 10:
                out.append(f"{name}: {n} of 10 brackets")
        for c in rep.checks:
            if c.ident.startswith("elliptic.") and not (c.detail.get("rational_part_zero")
                                                         and c.detail.get("radical_part_zero")):
                out.append(f"{c.ident}: extension components not both zero")
        return out
    _criterion(6, "canonicity", 60, "canonicity", extra=extra)


def test_07_separated():
    need = [f"polar.N{n}" for n in range(1, 6)]
    need += ["cartesian_I2.H", "cartesian_I2.I2", "cartesian_I1.H", "cartesian_I1.I1", "elliptic.staeckel"]
    _criterion(7, "separated forms", 60, "separated", {"N": 5}, extra=_require(*need))


def test_08_elliptic():
    _criterion(8, "elliptic geometry", 60, "elliptic",
               extra=_require("vieta", "discriminant_factored", "sigma_eigenforms", "level_set", "gnomonic",
                              "focal_points"))


def test_09_ode():
    def extra(rep):
        want = {"elliptic": "4 (Heun)", "polar": "3 (hypergeometric)",
                "cartesian_I2": "3 (hypergeometric)", "cartesian_I1": "3 (hypergeometric)"}
        have = {c.ident: c.residual for c in rep.checks}
        return [f"{k}: {have.get(k)} != {v}" for k, v in want.items() if have.get(k) != v]
    _criterion(9, "ODE classification", 1, "ode", extra=extra)


def test_10_obstruction():
    def extra(rep):
        need = [f"polar_cross.N{n}" for n in range(1, 6)]
        need += ["linear_coefficient", "n2_reduction", "cartesian_N2",
                 "polar_type.polar", "polar_type.polar_swapped", "polar_type.cartesian_I2"]
        out = _require(*need)(rep)
        w = {c.ident: c for c in rep.checks}.get("nonzero_witness")
        if w is None or w.status != RECORDED:
            out.append("nonzero witness for v1 v2 missing")
        return out
    _criterion(10, "obstruction", 30, "obstruction", {"N": 5}, extra)


def test_11_numeric():
    def extra(rep):
        out = []
        geo = [c for c in rep.checks if c.ident.startswith("geodesic.")]
        for branch in ("+1", "+0", "-1"):
            if not any(c.ident.startswith(f"geodesic.{branch}.") for c in geo):
                out.append(f"branch {branch} not sampled")
        cross = [c for c in rep.checks if c.ident.startswith(("commutes.", "chain.", "canonical.", "dependence"))]
        if not cross:
            out.append("no float cross-checks")
        for c in cross:
            if c.detail.get("samples", 50) < 50:
                out.append(f"{c.ident}: fewer than 50 samples")
        return out
    rep = _criterion(11, "numeric", 30, "numeric", {"samples": 100, "tol": 1e-10}, extra)
    assert rep.params["samples"] == "100"


def _cli_reports(out_dir):
    cmd = [sys.executable, "-m", "zernike_haantjes", "run", "all", "--format", "json", "--out", out_dir]
    proc = subprocess.run(cmd, capture_output=True)
    return proc.returncode, proc.stdout


def test_12_determinism():
    start = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        a, b = os.path.join(tmp, "a"), os.path.join(tmp, "b")
        code_a, out_a = _cli_reports(a)
        code_b, out_b = _cli_reports(b)
        files = sorted(os.listdir(a))
        same = out_a == out_b and files == sorted(os.listdir(b)) and all(
            open(os.path.join(a, f), "rb").read() == open(os.path.join(b, f), "rb").read() for f in files)
    seconds = time.perf_counter() - start
    ok = same and code_a == code_b == 0 and len(files) >= 2
    _record(12, "determinism", ok, seconds, None, f"{len(files)} report files compared byte for byte")
    assert code_a == code_b == 0
    assert same


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
