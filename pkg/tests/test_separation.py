from fractions import Fraction

import pytest
import sympy

from conftest import SYMS, to_sympy
from test_phase_space import sympy_bracket
from zernike_haantjes.arith import DEFAULT
from zernike_haantjes.models import hamiltonian, integrals
from zernike_haantjes.separation import (
    MAP_NAMES,
    CanonicalMap,
    StaeckelEllipticData,
    canonical_map,
    cartesian_forms,
    characteristic_check,
    distinct_root_count,
    elliptic_suite,
    exactness_check,
    ode_singularity_count,
    polar_form,
    pullback_check,
    reparametrize,
    verify_canonical,
)
from zernike_haantjes.phase_space import OneForm, differential

q1, q2, p1, p2, g1, g2 = (SYMS[n] for n in ("q1", "q2", "p1", "p2", "g1", "g2"))
Q1s, Q2s, P1s, P2s = (SYMS[n] for n in ("Q1", "Q2", "P1", "P2"))


@pytest.mark.parametrize("name", MAP_NAMES)
def test_catalog_maps_are_canonical(name):
    rep = verify_canonical(canonical_map(name))
    assert rep.passed, rep.failures()
    assert len(rep.checks) == 10


def test_cartesian_map_canonical_in_sympy():
    D = 1 + g2 * q1 ** 2
    Q = [q1, q2 / sympy.sqrt(D)]
    P = [p1 + g2 * q1 * q2 * p2 / D, p2 * sympy.sqrt(D)]
    for i in range(2):
        for j in range(2):
            assert sympy.simplify(sympy_bracket(Q[i], Q[j])) == 0
            assert sympy.simplify(sympy_bracket(P[i], P[j])) == 0
            assert sympy.simplify(sympy_bracket(Q[i], P[j]) - (1 if i == j else 0)) == 0


def test_non_canonical_map_is_rejected():
    good = canonical_map("cartesian_I2")
    bad = CanonicalMap("bad", good.Q, [good.P[0], DEFAULT.var("p2")])
    rep = verify_canonical(bad)
    assert not rep.passed


def _sympy_mixed(Q, P, H):
    """H(q, p) with p solved from P(q, p) = (P1, P2)."""
    sol = sympy.solve([P[0] - P1s, P[1] - P2s], [p1, p2], dict=True)[0]
    return H.subs(sol)


def test_cartesian_separated_form_in_sympy():
    D = 1 + g2 * q1 ** 2
    Q = [q1, q2 / sympy.sqrt(D)]
    P = [p1 + g2 * q1 * q2 * p2 / D, p2 * sympy.sqrt(D)]
    H = to_sympy(hamiltonian(2))
    Hs, _ = cartesian_forms(2)
    claimed = to_sympy(Hs).subs({Q1s: Q[0], Q2s: Q[1]})
    assert sympy.simplify(_sympy_mixed(Q, P, H) - claimed) == 0


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_polar_separated_forms(N):
    assert pullback_check(canonical_map("polar"), hamiltonian(N), polar_form(N)).passed


def test_pullback_detects_wrong_separated_form():
    Hs, _ = cartesian_forms(2)
    wrong = Hs + DEFAULT.var("g1") * DEFAULT.var("Q1")
    assert not pullback_check(canonical_map("cartesian_I2"), hamiltonian(2), wrong).passed


def test_staeckel_form_and_wrong_weight():
    cmap = canonical_map("elliptic")
    data = StaeckelEllipticData()
    assert pullback_check(cmap, hamiltonian(2), data.separated_form()).passed
    data.h = data.h * 2
    assert not pullback_check(cmap, hamiltonian(2), data.separated_form()).passed


def test_polar_angle_reparametrization():
    angle = reparametrize(canonical_map("polar"), 0, "1/(1 + x1^2)")
    assert verify_canonical(angle).passed
    J = integrals()[0]
    assert angle.P[0] == J


def test_characteristic_coordinates():
    for name in ("polar", "cartesian_I2", "cartesian_I1", "elliptic"):
        rep = characteristic_check(canonical_map(name))
        assert rep.passed, (name, rep.failures())


def test_elliptic_suite_and_negative_control():
    assert elliptic_suite().passed
    good = elliptic_suite(specialize={"k1": Fraction(3, 5), "k2": Fraction(4, 5)})
    assert good.passed
    bad = elliptic_suite(specialize={"k1": Fraction(3, 5), "k2": Fraction(3, 5)})
    assert not bad.passed


def test_exactness():
    J = integrals()[0]
    assert exactness_check(differential(J)).passed
    assert not exactness_check(OneForm([-DEFAULT.var("q2"), DEFAULT.var("q1"), 0, 0])).passed


def test_root_counting():
    x, a = DEFAULT.vars("x1", "g2")
    assert distinct_root_count(x * (x - 1) * (x + 2), "x1") == (3, [])
    assert distinct_root_count((x - 1) ** 2, "x1")[0] == 1
    assert distinct_root_count(1 + a * x ** 2, "x1")[0] == 2


@pytest.mark.parametrize("tag,count", [("elliptic", 4), ("polar", 3), ("cartesian_I2", 3), ("cartesian_I1", 3)])
def test_ode_classes(tag, count):
    n, label = ode_singularity_count(tag)
    assert n == count
    assert label == ("Heun" if count == 4 else "hypergeometric")


def test_ode_degenerate_elliptic():
    assert ode_singularity_count("elliptic", k1=0, k2=1) == (3, "hypergeometric")
