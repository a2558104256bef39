"""Darboux phase space R^4: Poisson bracket, differentials, symplectic pairing."""

from __future__ import annotations

from .arith import DEFAULT, differentiate, is_zero
from .report import PASS, RECORDED, Check, VerificationReport, residual_check

Q = ("q1", "q2")
P = ("p1", "p2")
COORDS = Q + P
DIM = 4

# omega = sum dq^i ^ dp_i; Omega has blocks (0, -I; I, 0), Poisson matrix is its inverse.
OMEGA = ((0, 0, -1, 0), (0, 0, 0, -1), (1, 0, 0, 0), (0, 1, 0, 0))
POISSON = ((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0))


class PhaseContext:
    """Coordinates (q1, q2, p1, p2) over an arithmetic context."""

    def __init__(self, ctx=DEFAULT):
        self.ctx = ctx
        self.coords = COORDS
        self.n = 2

    def var(self, name):
        return self.ctx.var(name)

    def coordinates(self):
        return [self.ctx.var(c) for c in self.coords]


class OneForm:
    """Coefficients on (dq1, dq2, dp1, dp2)."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != DIM:
            raise ValueError("a one-form needs four coefficients")
        self.c = coeffs

    @classmethod
    def basis(cls, name, ctx=DEFAULT):
        i = COORDS.index(name)
        return cls(ctx.const(1) if j == i else ctx.const(0) for j in range(DIM))

    def __getitem__(self, i):
        return self.c[i]

    def __iter__(self):
        return iter(self.c)

    def __add__(self, other):
        return OneForm(a + b for a, b in zip(self.c, other.c))

    def __sub__(self, other):
        return OneForm(a - b for a, b in zip(self.c, other.c))

    def __neg__(self):
        return OneForm(-a for a in self.c)

    def scale(self, f):
        return OneForm(f * a for a in self.c)

    def __rmul__(self, f):
        return self.scale(f)

    def is_zero(self):
        return all(is_zero(a) for a in self.c)

    def map(self, fn):
        return OneForm(fn(a) for a in self.c)

    def __str__(self):
        parts = [f"({a})*d{n}" for a, n in zip(self.c, COORDS) if not is_zero(a)]
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"OneForm({self})"


def poisson_bracket(f, g):
    """{f, g} = sum_i df/dq_i dg/dp_i - df/dp_i dg/dq_i."""
    total = 0
    for q, p in zip(Q, P):
        fq, gp = differentiate(f, q), differentiate(g, p)
        fp, gq = differentiate(f, p), differentiate(g, q)
        if not (is_zero(fq) or is_zero(gp)):
            total = fq * gp + total
        if not (is_zero(fp) or is_zero(gq)):
            total = total - fp * gq
    return total


def differential(f):
    return OneForm(differentiate(f, x) for x in COORDS)


def exterior_derivative(alpha: OneForm):
    """Components (a, b, d_a alpha_b - d_b alpha_a) for a < b."""
    out = []
    for a in range(DIM):
        for b in range(a + 1, DIM):
            out.append(
                (a, b, differentiate(alpha[b], COORDS[a]) - differentiate(alpha[a], COORDS[b]))
            )
    return out


def pairing(alpha: OneForm, X):
    total = 0
    for a, x in zip(alpha.c, X):
        if not (is_zero(a) or is_zero(x)):
            total = a * x + total
    return total


def poisson_vector(beta: OneForm):
    """P beta = (beta_p, -beta_q)."""
    return (beta[2], beta[3], -beta[0], -beta[1])


def poisson_pairing(alpha: OneForm, beta: OneForm):
    """<alpha, P beta>; equals {f, g} when alpha = df, beta = dg."""
    return pairing(alpha, poisson_vector(beta))


def compatibility_residual(K):
    """Omega K - K^T Omega as a 4x4 nested list."""
    rows = K.rows
    res = []
    for i in range(DIM):
        row = []
        for j in range(DIM):
            left = sum_terms(OMEGA[i][a] * rows[a][j] for a in range(DIM) if OMEGA[i][a])
            right = sum_terms(rows[a][i] * OMEGA[a][j] for a in range(DIM) if OMEGA[a][j])
            row.append(left - right)
        res.append(row)
    return res


def sum_terms(it):
    total = 0
    for t in it:
        total = t + total
    return total


def check_symplectic_compatibility(K, rules=(), name="compatibility") -> VerificationReport:
    """Omega K = K^T Omega, equivalently K = (A, B; C, A^T) with B, C skew."""
    rep = VerificationReport(name)
    res = compatibility_residual(K)
    flat = [r for row in res for r in row]
    rep.add(residual_check("omega_K_eq_KT_omega", "algebraic compatibility with omega", flat, rules))
    A, B, C, Dblk = K.blocks()
    block = []
    for i in range(2):
        for j in range(2):
            block.append(Dblk[i][j] - A[j][i])
            block.append(B[i][j] + B[j][i])
            block.append(C[i][j] + C[j][i])
    rep.add(residual_check("block_form", "blocks (A, B; C, A^T), B and C skew", block, rules))
    b_zero = all(is_zero(B[i][j]) for i in range(2) for j in range(2))
    status = PASS if b_zero else RECORDED
    rep.add(Check("lift_form", "B block vanishes", status, "zero" if b_zero else "nonzero"))
    return rep
