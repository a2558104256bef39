import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import SYMS, to_sympy
from zernike_haantjes.arith import DEFAULT, evaluate
from zernike_haantjes.obstruction import (
    EptCandidate,
    candidate,
    cross_derivative,
    cross_residual,
    degree_part,
    frame_hamiltonian,
    obstruction_report,
    polar_type_check,
    pulled_back_hamiltonian,
    v_product,
)
from zernike_haantjes.report import vanishes

q1, q2, g2, g3 = (SYMS[n] for n in ("q1", "q2", "g2", "g3"))
P1, P2 = SYMS["P1"], SYMS["P2"]


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5])
def test_polar_candidates_pass_for_every_order(N):
    assert vanishes(cross_residual(candidate("polar"), N))
    assert vanishes(cross_residual(candidate("polar_swapped"), N))


@pytest.mark.parametrize("name", ["polar", "identity", "cartesian_I2"])
@pytest.mark.parametrize("N", [2, 3, 5])
def test_two_routes_agree(name, N):
    c = candidate(name)
    assert vanishes(cross_residual(c, N) - cross_derivative(c, N))
    assert vanishes(frame_hamiltonian(c, N) - pulled_back_hamiltonian(c, N))


def test_cross_residual_against_sympy_for_cartesian_positions():
    N = 3
    Q = [q1, q2 / sympy.sqrt(1 + g2 * q1 ** 2)]
    J = sympy.Matrix(2, 2, lambda i, j: sympy.diff(Q[i], (q1, q2)[j]))
    p = J.T * sympy.Matrix([P1, P2])
    s = q1 * p[0] + q2 * p[1]
    H = p[0] ** 2 + p[1] ** 2 + sum(SYMS[f"g{n}"] * s ** n for n in range(1, N + 1))
    ref = sympy.diff(H, P1, P2)
    ours = to_sympy(cross_residual(candidate("cartesian_I2"), N))
    assert sympy.simplify(ours - ref) == 0
    assert sympy.simplify(ref) != 0


def test_cartesian_positions_fail_from_order_three():
    c = candidate("cartesian_I2")
    assert vanishes(cross_residual(c, 2))
    res = cross_residual(c, 3)
    assert not vanishes(res)
    lin = degree_part(res, 1, DEFAULT)
    vv = to_sympy(v_product(c))
    vP = to_sympy(c.v_dot_P())
    assert sympy.simplify(to_sympy(lin) - 6 * g3 * vv * vP) == 0
    assert evaluate(v_product(c), {"q1": 1, "q2": 1, "g2": 1}) != 0


def test_identity_v_product():
    assert vanishes(v_product(candidate("identity")) - DEFAULT.var("q1") * DEFAULT.var("q2"))


def test_polar_type_classification():
    assert polar_type_check(candidate("polar")).passed
    swapped = polar_type_check(candidate("polar_swapped"))
    assert swapped.passed
    assert swapped.checks[0].detail["swapped"] is True
    assert not polar_type_check(candidate("cartesian_I2")).passed


def test_candidate_validation():
    with pytest.raises(ValueError):
        EptCandidate("moving", "q1 + p1", "q2")
    with pytest.raises(ValueError):
        EptCandidate("singular", "q1 + q2", "2*q1 + 2*q2")


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 2),
       st.integers(1, 4))
@settings(max_examples=25, deadline=None)
def test_angle_times_radius_candidates_are_polar_type(a, b, c, d, m, N):
    """Degree-zero homogeneous Q1 and radial Q2 give a vanishing cross residual."""
    # numerator b q1 + a q2 not proportional to the denominator c q1 + d q2
    assume(b * d - a * c != 0)
    cand = EptCandidate("h", f"({a}*q2 + {b}*q1)/({c}*q1 + {d}*q2)", f"(q1^2 + q2^2)^{m}")
    assert vanishes(cross_residual(cand, N))
    assert polar_type_check(cand).passed


@pytest.mark.parametrize("N", [2, 3, 5])
def test_report_passes(N):
    rep = obstruction_report(N)
    assert rep.passed, rep.failures()


def test_report_rejects_out_of_range():
    with pytest.raises(ValueError):
        obstruction_report(6)
