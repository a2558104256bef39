from fractions import Fraction

import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from zernike_haantjes.linsolve import LinearSystem


def _apply(coeffs, x):
    return sum(Fraction(c) * x.get(u, 0) for u, c in coeffs.items())


def test_unique_solution():
    s = LinearSystem()
    s.add({"x": 1, "y": 1}, 3)
    s.add({"x": 1, "y": -1}, Fraction(1, 2))
    sol = s.solve()
    assert sol.consistent
    assert sol.nullspace == []
    assert sol.particular == {"x": Fraction(7, 4), "y": Fraction(5, 4)}


def test_conflict_reports_origins():
    s = LinearSystem()
    s.add({"x": 1}, 1, origin="m1")
    s.add({"x": 2}, 3, origin="m2")
    s.add({"y": 1}, 0, origin="m3")
    sol = s.solve()
    assert not sol.consistent
    assert sol.conflicts == [{"m1", "m2"}]


def test_trivial_rows_are_dropped():
    s = LinearSystem()
    s.add({"x": 0}, 0)
    assert s.rows == []


matrices = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.tuples(
            st.lists(st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=m, max_size=m),
            st.lists(st.integers(-4, 4), min_size=m, max_size=m),
        )
    )
)


@given(matrices)
@settings(max_examples=80, deadline=None)
def test_against_sympy(data):
    A, b = data
    n = len(A[0])
    names = [f"x{i}" for i in range(n)]
    s = LinearSystem()
    for u in names:
        s.add_unknown(u)
    for row, rhs in zip(A, b):
        s.add(dict(zip(names, row)), rhs)
    sol = s.solve()
    M = sympy.Matrix(A)
    aug = M.row_join(sympy.Matrix(b))
    assert sol.consistent == (M.rank() == aug.rank())
    if not sol.consistent:
        return
    assert len(sol.nullspace) == n - M.rank()
    for row, rhs in zip(A, b):
        coeffs = dict(zip(names, row))
        assert _apply(coeffs, sol.particular) == rhs
        for v in sol.nullspace:
            assert _apply(coeffs, v) == 0
    if sol.nullspace:
        N = sympy.Matrix([[v.get(u, 0) for u in names] for v in sol.nullspace])
        assert N.rank() == len(sol.nullspace)
