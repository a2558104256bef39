import sympy
from hypothesis import given, settings

from conftest import SYMS, polynomials, to_sympy
from zernike_haantjes.arith import DEFAULT
from zernike_haantjes.phase_space import (
    OneForm,
    check_symplectic_compatibility,
    differential,
    exterior_derivative,
    poisson_bracket,
    poisson_pairing,
)
from zernike_haantjes.tensor import TensorField11

q1, q2, p1, p2 = DEFAULT.vars("q1", "q2", "p1", "p2")


def sympy_bracket(f, g):
    Q = [SYMS["q1"], SYMS["q2"]]
    P = [SYMS["p1"], SYMS["p2"]]
    return sum(sympy.diff(f, q) * sympy.diff(g, p) - sympy.diff(f, p) * sympy.diff(g, q) for q, p in zip(Q, P))


def test_canonical_brackets():
    assert poisson_bracket(q1, p1) == 1
    assert poisson_bracket(p2, q2) == -1
    assert poisson_bracket(q1, p2) == 0


@given(polynomials(max_terms=3), polynomials(max_terms=3))
@settings(max_examples=60, deadline=None)
def test_bracket_matches_sympy(f, g):
    got = to_sympy(poisson_bracket(f, g))
    assert sympy.expand(got - sympy_bracket(to_sympy(f), to_sympy(g))) == 0


@given(polynomials(max_terms=3), polynomials(max_terms=3))
@settings(max_examples=60, deadline=None)
def test_antisymmetry(f, g):
    assert poisson_bracket(f, g) + poisson_bracket(g, f) == 0


@given(polynomials(max_terms=2), polynomials(max_terms=2), polynomials(max_terms=2))
@settings(max_examples=40, deadline=None)
def test_jacobi_identity(f, g, h):
    pb = poisson_bracket
    total = pb(f, pb(g, h)) + pb(g, pb(h, f)) + pb(h, pb(f, g))
    assert total == 0


@given(polynomials(max_terms=3), polynomials(max_terms=3))
@settings(max_examples=40, deadline=None)
def test_pairing_of_differentials_is_the_bracket(f, g):
    assert poisson_pairing(differential(f), differential(g)) == poisson_bracket(f, g)


@given(polynomials(max_terms=3))
@settings(max_examples=40, deadline=None)
def test_exact_forms_are_closed(f):
    assert all(c == 0 for _, _, c in exterior_derivative(differential(f)))


def test_non_closed_form_detected():
    alpha = OneForm([q2, 0, 0, 0])
    comps = {(a, b): c for a, b, c in exterior_derivative(alpha)}
    assert comps[(0, 1)] == -1


def test_compatibility_accepts_lift_and_rejects_generic():
    A = [[q2 ** 2, -q1 * q2], [-q1 * q2, q1 ** 2]]
    C = [[0, -(q1 * p2 - q2 * p1)], [q1 * p2 - q2 * p1, 0]]
    K = TensorField11.from_blocks(A, [[0, 0], [0, 0]], C)
    assert check_symplectic_compatibility(K).passed
    bad = TensorField11.diagonal([1, q1, 1, 1])
    rep = check_symplectic_compatibility(bad)
    assert not rep.passed
