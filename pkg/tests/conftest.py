import sympy
from hypothesis import settings
from hypothesis import strategies as st

from zernike_haantjes.arith import DEFAULT, Polynomial

PHASE = ("q1", "q2", "p1", "p2")
SYMS = {n: sympy.Symbol(n) for n in DEFAULT.names}

ACCEPTANCE_LINES = []

# sympy oracles have uneven per-example cost; timing is asserted only in the acceptance tests
settings.register_profile("default", deadline=None)
settings.load_profile("default")


def to_sympy(x):
    """Independent view of an exact expression: print, then let sympy parse it."""
    return sympy.sympify(str(x).replace("^", "**"), locals=SYMS)


def sympy_zero(expr):
    return sympy.simplify(expr) == 0


@st.composite
def polynomials(draw, names=PHASE, max_terms=4, max_exp=2, coeff=5):
    idx = [DEFAULT.index[n] for n in names]
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = [0] * DEFAULT.nvars
        for i in idx:
            exp[i] = draw(st.integers(0, max_exp))
        c = draw(st.integers(-coeff, coeff))
        if c:
            terms[tuple(exp)] = terms.get(tuple(exp), 0) + c
    return Polynomial(DEFAULT, {e: c for e, c in terms.items() if c})


def nonzero_polynomials(**kw):
    return polynomials(**kw).filter(lambda p: not p.is_zero())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
