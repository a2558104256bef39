import sympy
import pytest

from conftest import SYMS, to_sympy
from test_phase_space import sympy_bracket
from zernike_haantjes.arith import DEFAULT
from zernike_haantjes.models import (
    UnknownEntry,
    casimir_polynomial,
    catalog,
    catalog_names,
    chain_residual,
    generators,
    hamiltonian,
    integrals,
    symmetry_algebra_report,
    validate_entry,
)
from zernike_haantjes.tensor import TensorField11

q1, q2, p1, p2, g1, g2 = (SYMS[n] for n in ("q1", "q2", "p1", "p2", "g1", "g2"))


def sympy_hamiltonian(N):
    s = q1 * p1 + q2 * p2
    return p1 ** 2 + p2 ** 2 + sum(SYMS[f"g{n}"] * s ** n for n in range(1, N + 1))


@pytest.mark.parametrize("N", [1, 2, 3, 5])
def test_hamiltonian_matches_sympy(N):
    assert sympy.expand(to_sympy(hamiltonian(N)) - sympy_hamiltonian(N)) == 0


def test_hamiltonian_rejects_zero_order():
    with pytest.raises(ValueError):
        hamiltonian(0)


def test_integrals_commute_in_sympy():
    H = sympy_hamiltonian(2)
    for I in integrals():
        assert sympy.expand(sympy_bracket(H, to_sympy(I))) == 0


@pytest.mark.parametrize("N", [3, 4])
def test_angular_momentum_commutes_for_higher_orders(N):
    J = to_sympy(integrals()[0])
    assert sympy.expand(sympy_bracket(sympy_hamiltonian(N), J)) == 0


def test_casimir_identity_in_sympy():
    X1, X2, X3 = (to_sympy(x) for x in generators())
    H = sympy_hamiltonian(2)
    C = X2 ** 2 + X3 ** 2 - (g1 ** 2 + 2 * g2 * H) * X1 ** 2 - 4 * g2 ** 2 * X1 ** 4
    assert sympy.expand(C - H ** 2 / 4) == 0
    ours = casimir_polynomial(*generators(), hamiltonian(2), DEFAULT.var("g1"), DEFAULT.var("g2"))
    assert sympy.expand(to_sympy(ours) - C) == 0


def test_symmetry_algebra_report_passes():
    rep = symmetry_algebra_report()
    assert rep.passed, rep.failures()


def test_catalog_K_I2_against_published_matrix():
    K = catalog("K_I2").tensor
    want = [
        [0, 0, 0, 0],
        [-g2 * q1 * q2, 1 + g2 * q1 ** 2, 0, 0],
        [0, -g2 * q1 * p2, 0, -g2 * q1 * q2],
        [g2 * q1 * p2, 0, 0, 1 + g2 * q1 ** 2],
    ]
    for i in range(4):
        for j in range(4):
            assert sympy.expand(to_sympy(K.rows[i][j]) - want[i][j]) == 0


def test_catalog_K_J2_against_published_matrix():
    K = catalog("K_J2").tensor
    J = q1 * p2 - q2 * p1
    want = [
        [q2 ** 2, -q1 * q2, 0, 0],
        [-q1 * q2, q1 ** 2, 0, 0],
        [0, -J, q2 ** 2, -q1 * q2],
        [J, 0, -q1 * q2, q1 ** 2],
    ]
    for i in range(4):
        for j in range(4):
            assert sympy.expand(to_sympy(K.rows[i][j]) - want[i][j]) == 0


def test_K_I2_at_zero_curvature_is_diagonal():
    K = catalog("K_I2", g2=0).tensor
    assert K.equals(TensorField11.diagonal([0, 1, 0, 1]))


@pytest.mark.parametrize("name", catalog_names())
def test_every_catalog_entry_validates(name):
    rep = validate_entry(catalog(name))
    assert rep.passed, rep.failures()


def test_chain_residual_detects_wrong_integral():
    K = catalog("K_I2").tensor
    _, I1, _ = integrals()
    res = chain_residual(K, hamiltonian(2), I1)
    assert not res.is_zero()


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        catalog("K_nope")
