from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zernike_haantjes.arith import DEFAULT, Polynomial
from zernike_haantjes.chain_solver import AnsatzSpec, divisor_monomials, filter_haantjes, solve_chain
from zernike_haantjes.models import catalog, chain_residual, hamiltonian, integrals
from zernike_haantjes.tensor import haantjes_torsion

H2 = hamiltonian(2)
J, I1, I2 = integrals()


FAMILY_I2 = solve_chain(H2, I2, AnsatzSpec(2))


@given(st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=7), min_size=3, max_size=3))
@settings(max_examples=30, deadline=None)
def test_every_family_member_satisfies_the_chain(t):
    assert FAMILY_I2.dimension == 3
    K = FAMILY_I2.member(t)
    assert chain_residual(K, H2, I2).is_zero()
    assert FAMILY_I2.coordinates_of(K) == t


def test_I2_family_contains_catalog_operator_and_filter_finds_it():
    fam = solve_chain(H2, I2, AnsatzSpec(2))
    target = catalog("K_I2").tensor
    assert fam.contains(target)
    result = filter_haantjes(fam)
    assert any(K.equals(target) for _, K in result.members)
    for _, K in result.members:
        assert haantjes_torsion(K).is_zero()


def test_J2_family_and_linearity_in_the_target():
    fam = solve_chain(H2, J ** 2, AnsatzSpec(2, params=()))
    K = catalog("K_J2").tensor
    assert fam.contains(K)
    half = solve_chain(H2, J ** 2 * Fraction(1, 2), AnsatzSpec(2, params=()))
    assert half.contains(K.scale(Fraction(1, 2)))
    assert not half.contains(K)


def test_I1_by_symmetry():
    fam = solve_chain(H2, I1, AnsatzSpec(2))
    assert fam.contains(catalog("K_I1").tensor)


def test_inconsistent_target_lists_monomials():
    fam = solve_chain(H2, DEFAULT.var("q1"), AnsatzSpec(2))
    assert fam.empty
    assert "dq1: 1" in fam.diagnostics["uncancelled_monomials"]
    assert filter_haantjes(fam).members == []


def test_too_small_ansatz_misses_the_operator():
    fam = solve_chain(H2, I2, AnsatzSpec(1))
    assert fam.empty or not fam.contains(catalog("K_I2").tensor)


def test_divisor_monomials():
    g1, g2, k1, q1 = DEFAULT.vars("g1", "g2", "k1", "q1")
    I = g2 * k1 ** 2 * q1 + g1
    got = {Polynomial(DEFAULT, {e: 1}) for e in divisor_monomials(I)}
    want = {DEFAULT.const(1), g1, g2, k1, k1 ** 2, g2 * k1, g2 * k1 ** 2}
    assert got == want


def test_ansatz_validation():
    with pytest.raises(ValueError):
        AnsatzSpec({"A": -2})
    a = AnsatzSpec({"B": -1})
    assert all(lab[0][0] != "b" for lab in a.unknowns())
