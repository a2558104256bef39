import random

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import SYMS, to_sympy
from zernike_haantjes.arith import DEFAULT
from zernike_haantjes.models import catalog
from zernike_haantjes.suites import random_tensor
from zernike_haantjes.tensor import (
    TensorField11,
    charpoly,
    eigen_data,
    haantjes_torsion,
    haantjes_torsion_invariant,
    nijenhuis_torsion,
)

X = [SYMS[n] for n in ("q1", "q2", "p1", "p2")]
q1, q2, p1, p2, g2 = DEFAULT.vars("q1", "q2", "p1", "p2", "g2")


def sym_matrix(K):
    return sympy.Matrix(4, 4, lambda i, j: to_sympy(K.rows[i][j]))


def lie(V, W):
    return [sum(V[a] * sympy.diff(W[i], X[a]) - W[a] * sympy.diff(V[i], X[a]) for a in range(4)) for i in range(4)]


def sympy_nijenhuis(L, U, V):
    """T(U,V) = [LU,LV] - L([LU,V] + [U,LV]) + L^2 [U,V] for vector fields given as lists."""
    LU, LV = list(L * sympy.Matrix(U)), list(L * sympy.Matrix(V))
    a = sympy.Matrix(lie(LU, LV))
    b = sympy.Matrix(lie(LU, V)) + sympy.Matrix(lie(U, LV))
    c = sympy.Matrix(lie(U, V))
    return a - L * b + L * L * c


def basis(j):
    return [sympy.Integer(1 if i == j else 0) for i in range(4)]


def sympy_haantjes(L, j, k):
    e_j, e_k = basis(j), basis(k)
    T = lambda U, V: sympy_nijenhuis(L, U, V)
    Lj, Lk = list(L * sympy.Matrix(e_j)), list(L * sympy.Matrix(e_k))
    return L * L * T(e_j, e_k) + T(Lj, Lk) - L * (T(e_j, Lk) + T(Lj, e_k))


@given(st.integers(0, 10 ** 6))
@settings(max_examples=6, deadline=None)
def test_nijenhuis_matches_lie_bracket_oracle(seed):
    K = random_tensor(random.Random(seed), 1)
    L = sym_matrix(K)
    T = nijenhuis_torsion(K)
    for j in range(4):
        for k in range(j + 1, 4):
            ref = sympy_nijenhuis(L, basis(j), basis(k))
            for i in range(4):
                assert sympy.expand(to_sympy(T[i, j, k]) - ref[i]) == 0


@given(st.integers(0, 10 ** 6))
@settings(max_examples=2, deadline=None)
def test_haantjes_matches_oracle(seed):
    """Compared at random rational points; full symbolic expansion in sympy is slow."""
    rng = random.Random(seed)
    K = random_tensor(rng, 1)
    L = sym_matrix(K)
    H = haantjes_torsion(K)
    points = [{n: sympy.Rational(rng.randint(-9, 9), rng.randint(1, 5)) for n in ("q1", "q2", "p1", "p2")}
              for _ in range(3)]
    for j, k in ((0, 1), (1, 3), (2, 3)):
        ref = sympy_haantjes(L, j, k)
        for i in range(4):
            for pt in points:
                want = ref[i].subs({SYMS[n]: v for n, v in pt.items()})
                assert to_sympy(H[i, j, k]).subs({SYMS[n]: v for n, v in pt.items()}) == want


@given(st.integers(0, 10 ** 6))
@settings(max_examples=5, deadline=None)
def test_coordinate_and_invariant_formulas_agree(seed):
    K = random_tensor(random.Random(seed), 1)
    assert (haantjes_torsion(K) - haantjes_torsion_invariant(K)).is_zero()


@given(st.integers(0, 10 ** 6))
@settings(max_examples=5, deadline=None)
def test_torsion_antisymmetry(seed):
    K = random_tensor(random.Random(seed), 1)
    assert all(r == 0 for r in nijenhuis_torsion(K).antisymmetry_residuals())


def test_constant_and_identity_are_torsion_free():
    assert nijenhuis_torsion(TensorField11.identity()).is_zero()
    assert nijenhuis_torsion(TensorField11.diagonal([1, 2, 3, 4])).is_zero()


def test_generic_tensor_has_nonzero_torsion():
    K = random_tensor(random.Random(7), 1)
    assert not nijenhuis_torsion(K).is_zero()
    assert not haantjes_torsion(K).is_zero()


def test_catalog_operator_spectrum():
    K = catalog("K_I2").tensor
    eig = eigen_data(K)
    vals = sorted(str(e) for e, _ in eig)
    assert vals == sorted([str(DEFAULT.const(0)), str(1 + g2 * q1 ** 2)])
    lam = sympy.Symbol("lam")
    ref = sympy.expand((sym_matrix(K) - lam * sympy.eye(4)).det())
    got = sum(to_sympy(c) * lam ** (4 - n) for n, c in enumerate(charpoly(K)))
    assert sympy.expand(got - ref) == 0


def test_matrix_algebra_matches_sympy():
    K = catalog("K_J2").tensor
    M = sym_matrix(K)
    assert sympy.expand(sym_matrix(K @ K) - M * M) == sympy.zeros(4, 4)
    assert sympy.expand(to_sympy(K.trace()) - M.trace()) == 0
