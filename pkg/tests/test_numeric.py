import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zernike_haantjes.numeric import (
    FloatIdentity,
    KappaFunctions,
    TangentPole,
    float_cross_check,
    geodesic_polar_check,
    geodesic_to_cartesian,
    kappa_eval,
    kappa_identity_check,
    kappa_identity_residual,
    numeric_report,
    small_kappa_series_check,
)


def test_kappa_branches():
    assert kappa_eval(0, 0.3) == (0.3, 1, 0.3)
    s, c, t = kappa_eval(4.0, 0.3)
    assert s == pytest.approx(math.sin(0.6) / 2)
    assert c == pytest.approx(math.cos(0.6))
    assert t == pytest.approx(math.tan(0.6) / 2)
    s, c, t = kappa_eval(-4.0, 0.3)
    assert s == pytest.approx(math.sinh(0.6) / 2)
    assert c == pytest.approx(math.cosh(0.6))


def test_tangent_pole():
    f = KappaFunctions(1.0)
    with pytest.raises(TangentPole):
        f.T(math.pi / 2)
    assert kappa_eval(1.0, math.pi / 2)[2] is None
    assert f.domain() == (0.0, pytest.approx(math.pi / 2))


@given(st.floats(-3, 3).filter(lambda k: abs(k) > 1e-3), st.floats(0.05, 0.95))
def test_kappa_identity_property(kappa, frac):
    lo, hi = KappaFunctions(kappa).domain()
    x = frac * min(hi, 3.0)
    assert kappa_identity_residual(kappa, x) < 1e-12


@given(st.sampled_from([-1.3, 0.0, 0.8]), st.floats(0.1, 1.0), st.floats(0, 6.28), st.floats(-2, 2),
       st.floats(-2, 2))
def test_geodesic_map_radius_and_angular_momentum(kappa, rho, phi, prho, pphi):
    q1, q2, p1, p2 = geodesic_to_cartesian(kappa, 0.7, rho, phi, prho, pphi)
    S = KappaFunctions(kappa).S(rho)
    assert math.hypot(q1, q2) == pytest.approx(abs(S), rel=1e-12)
    assert q1 * p2 - q2 * p1 == pytest.approx(pphi, rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("branch", [1, 0, -1])
@pytest.mark.parametrize("gamma1", ["real", "imaginary"])
def test_geodesic_polar_forms(branch, gamma1):
    rep = geodesic_polar_check(branch, gamma1, samples=100)
    assert rep.passed, rep.failures()


@pytest.mark.parametrize("branch", [1, -1])
def test_kappa_identity_check(branch):
    assert kappa_identity_check(branch).passed


def test_small_kappa_series():
    assert small_kappa_series_check().passed


def test_float_cross_check_negative_control():
    good = FloatIdentity("square", lambda p: (p["q1"] + p["q2"]) ** 2,
                         lambda p: p["q1"] ** 2 + 2 * p["q1"] * p["q2"] + p["q2"] ** 2)
    assert float_cross_check(good).passed
    bad = FloatIdentity("square_wrong", lambda p: (p["q1"] + p["q2"]) ** 2,
                        lambda p: p["q1"] ** 2 + p["q2"] ** 2)
    assert not float_cross_check(bad).passed


def test_float_cross_check_is_seeded():
    ident = FloatIdentity("noise", lambda p: p["q1"], lambda p: p["q1"] * (1 + 1e-3 * p["q2"]))
    a = float_cross_check(ident, seed=5)
    b = float_cross_check(ident, seed=5)
    assert a.residual == b.residual


def test_numeric_report():
    rep = numeric_report()
    assert rep.passed, rep.failures()
