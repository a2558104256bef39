"""(1,1)-tensor fields on R^4, Nijenhuis and Haantjes torsions, spectra and
characteristic co-distributions."""

from __future__ import annotations

from fractions import Fraction

from .arith import (
    DEFAULT,
    Polynomial,
    QuadExtScalar,
    RationalFunction,
    cancel,
    clear_denominator,
    common_denominator,
    differentiate,
    is_number,
    is_zero,
    parse,
    subs,
)
from .phase_space import COORDS, DIM, OneForm
from .report import PASS, RECORDED, Check, VerificationReport, residual_check, vanishes


def _mul(a, b):
    if is_zero(a) or is_zero(b):
        return 0
    return a * b


def _sum(it):
    total = 0
    for t in it:
        if not is_zero(t):
            total = t + total
    return total


class TensorField11:
    """4x4 matrix of scalars; ``rows[i][j]`` is the component L^i_j."""

    __slots__ = ("rows", "ctx")

    def __init__(self, rows, ctx=DEFAULT):
        rows = [list(r) for r in rows]
        if len(rows) != DIM or any(len(r) != DIM for r in rows):
            raise ValueError("a (1,1)-tensor on R^4 needs a 4x4 matrix")
        self.rows = rows
        self.ctx = ctx

    @classmethod
    def parse(cls, rows, ctx=DEFAULT):
        return cls([[parse(str(e), ctx) for e in r] for r in rows], ctx)

    @classmethod
    def identity(cls, ctx=DEFAULT):
        return cls([[1 if i == j else 0 for j in range(DIM)] for i in range(DIM)], ctx)

    @classmethod
    def zero(cls, ctx=DEFAULT):
        return cls([[0] * DIM for _ in range(DIM)], ctx)

    @classmethod
    def diagonal(cls, entries, ctx=DEFAULT):
        return cls([[entries[i] if i == j else 0 for j in range(DIM)] for i in range(DIM)], ctx)

    @classmethod
    def from_blocks(cls, A, B, C, D=None, ctx=DEFAULT):
        if D is None:
            D = [[A[j][i] for j in range(2)] for i in range(2)]
        rows = [list(A[i]) + list(B[i]) for i in range(2)] + [list(C[i]) + list(D[i]) for i in range(2)]
        return cls(rows, ctx)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def blocks(self):
        r = self.rows
        A = [[r[i][j] for j in range(2)] for i in range(2)]
        B = [[r[i][j + 2] for j in range(2)] for i in range(2)]
        C = [[r[i + 2][j] for j in range(2)] for i in range(2)]
        D = [[r[i + 2][j + 2] for j in range(2)] for i in range(2)]
        return A, B, C, D

    def is_lift_form(self, rules=()):
        _, B, _, _ = self.blocks()
        return all(vanishes(B[i][j], rules) for i in range(2) for j in range(2))

    def map(self, fn):
        return TensorField11([[fn(e) for e in r] for r in self.rows], self.ctx)

    def __add__(self, other):
        return TensorField11(
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.ctx
        )

    def __sub__(self, other):
        return TensorField11(
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.ctx
        )

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, f):
        return self.map(lambda e: _mul(f, e))

    def __rmul__(self, f):
        return self.scale(f)

    def __matmul__(self, other):
        a, b = self.rows, other.rows
        return TensorField11(
            [[_sum(_mul(a[i][m], b[m][j]) for m in range(DIM)) for j in range(DIM)] for i in range(DIM)],
            self.ctx,
        )

    def transpose(self):
        return TensorField11([[self.rows[j][i] for j in range(DIM)] for i in range(DIM)], self.ctx)

    def trace(self):
        return _sum(self.rows[i][i] for i in range(DIM))

    def apply(self, X):
        return [_sum(_mul(self.rows[i][j], X[j]) for j in range(DIM)) for i in range(DIM)]

    def transpose_apply(self, alpha: OneForm):
        """K^T alpha, components (K^T alpha)_j = sum_i K^i_j alpha_i."""
        return OneForm(_sum(_mul(self.rows[i][j], alpha[i]) for i in range(DIM)) for j in range(DIM))

    def shift(self, lam):
        """K - lam I."""
        return TensorField11(
            [[self.rows[i][j] - lam if i == j else self.rows[i][j] for j in range(DIM)] for i in range(DIM)],
            self.ctx,
        )

    def subs(self, mapping):
        return self.map(lambda e: subs(e, mapping))

    def entries(self):
        return [e for r in self.rows for e in r]

    def equals(self, other, rules=()):
        return all(vanishes(a - b, rules) for a, b in zip(self.entries(), other.entries()))

    def is_zero(self, rules=()):
        return all(vanishes(e, rules) for e in self.entries())

    def free_symbols(self):
        names = set()
        for e in self.entries():
            for part in _polys(e):
                names |= part.free_names()
        return names

    def to_rows_text(self):
        return [[str(e) for e in r] for r in self.rows]

    def __str__(self):
        return "\n".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.rows)

    def __repr__(self):
        return f"TensorField11(\n{self}\n)"


def _polys(e):
    if is_number(e):
        return []
    if isinstance(e, Polynomial):
        return [e]
    if isinstance(e, RationalFunction):
        return [e.num] + [f for f, _ in e.den]
    return _polys(e.a) + _polys(e.b) + [e.D]


def swap_image(K: TensorField11):
    """Image under the involution q1 <-> q2, p1 <-> p2: entries permuted and variables swapped."""
    ctx = K.ctx
    perm = (1, 0, 3, 2)
    mapping = {"q1": ctx.var("q2"), "q2": ctx.var("q1"), "p1": ctx.var("p2"), "p2": ctx.var("p1")}
    rows = [[subs(K.rows[perm[i]][perm[j]], mapping) for j in range(DIM)] for i in range(DIM)]
    return TensorField11(rows, ctx)


class Torsion3Tensor:
    """Components ``comp[i][j][k]``, antisymmetric in (j, k)."""

    __slots__ = ("comp",)

    def __init__(self, comp):
        self.comp = comp

    def __getitem__(self, ijk):
        i, j, k = ijk
        return self.comp[i][j][k]

    def components(self):
        for i in range(DIM):
            for j in range(DIM):
                for k in range(DIM):
                    yield (i, j, k), self.comp[i][j][k]

    def independent(self):
        return [c for (i, j, k), c in self.components() if j < k]

    def is_zero(self, rules=()):
        return all(vanishes(c, rules) for c in self.independent())

    def antisymmetry_residuals(self):
        return [self.comp[i][j][k] + self.comp[i][k][j] for i in range(DIM) for j in range(DIM) for k in range(DIM)]

    def __sub__(self, other):
        return Torsion3Tensor(
            [[[self.comp[i][j][k] - other.comp[i][j][k] for k in range(DIM)] for j in range(DIM)] for i in range(DIM)]
        )


def _derivs(L: TensorField11):
    """d[x][a][b] = d L^a_b / d x^x."""
    return [[[differentiate(L.rows[a][b], x) for b in range(DIM)] for a in range(DIM)] for x in COORDS]


def nijenhuis_torsion(L: TensorField11) -> Torsion3Tensor:
    """(T_L)^i_jk = sum_a dL^i_k/dx^a L^a_j - dL^i_j/dx^a L^a_k + (dL^a_j/dx^k - dL^a_k/dx^j) L^i_a."""
    r = L.rows
    d = _derivs(L)
    comp = [[[0] * DIM for _ in range(DIM)] for _ in range(DIM)]
    for i in range(DIM):
        for j in range(DIM):
            for k in range(j + 1, DIM):
                v = _sum(
                    t
                    for a in range(DIM)
                    for t in (
                        _mul(d[a][i][k], r[a][j]),
                        -_mul(d[a][i][j], r[a][k]),
                        _mul(d[k][a][j] - d[j][a][k], r[i][a]),
                    )
                )
                comp[i][j][k] = v
                comp[i][k][j] = -v
    return Torsion3Tensor(comp)


def haantjes_torsion(L: TensorField11) -> Torsion3Tensor:
    """Haantjes torsion from the local coordinate expression in L, L^2, L^3 and
    their first derivatives. The skew-symmetrization is X_[jk] = X_jk - X_kj
    (no factor 1/2); with this convention it equals the invariant form exactly."""
    L1 = L.rows
    M = (L @ L).rows
    L3 = (L @ L @ L).rows
    dL = _derivs(L)
    dM = _derivs(TensorField11(M, L.ctx))
    n = DIM

    def E(i, j, k):
        terms = []
        for a in range(n):
            terms.append(_mul(-2, _mul(L3[i][a], dL[j][a][k])))
            inner = dM[j][a][k] + 4 * _sum(_mul(L1[b][j], dL[b][a][k]) for b in range(n))
            terms.append(_mul(M[i][a], inner))
            inner2 = _sum(_mul(L1[b][j], dM[b][a][k]) + _mul(M[b][j], dL[b][a][k]) for b in range(n))
            terms.append(_mul(-2, _mul(L1[i][a], inner2)))
            terms.append(_mul(M[a][j], dM[a][i][k]))
        return _sum(terms)

    comp = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                v = E(i, j, k) - E(i, k, j)
                comp[i][j][k] = v
                comp[i][k][j] = -v
    return Torsion3Tensor(comp)


def haantjes_torsion_invariant(L: TensorField11, T: Torsion3Tensor | None = None) -> Torsion3Tensor:
    """H(X,Y) = L^2 T(X,Y) + T(LX,LY) - L(T(X,LY) + T(LX,Y)) in components."""
    if T is None:
        T = nijenhuis_torsion(L)
    l = L.rows
    M = (L @ L).rows
    t = T.comp
    n = DIM
    comp = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                v = _sum(_mul(M[i][a], t[a][j][k]) for a in range(n))
                v = v + _sum(_mul(t[i][a][b], _mul(l[a][j], l[b][k])) for a in range(n) for b in range(n))
                w = _sum(
                    _mul(l[i][a], _mul(t[a][j][b], l[b][k]) + _mul(t[a][b][k], l[b][j]))
                    for a in range(n)
                    for b in range(n)
                )
                v = v - w
                comp[i][j][k] = v
                comp[i][k][j] = -v
    return Torsion3Tensor(comp)


# ---------------------------------------------------------------- spectra
def _sqrt_scalar(disc, ctx):
    """Square root of a polynomial or rational function: exact if possible, else in the extension."""
    disc = cancel(disc) if not is_number(disc) else disc
    if is_number(disc):
        disc = ctx.const(disc)
    if isinstance(disc, RationalFunction):
        if disc.is_polynomial():
            disc = disc.num
        else:
            # sqrt(n/d) = sqrt(n d)/d
            den = disc.den_poly()
            root = _sqrt_scalar(disc.num * den, ctx)
            return root / den
    root = disc.sqrt_exact()
    if root is not None:
        return root
    return QuadExtScalar.sqrt(disc)


def quadratic_roots(trace, det, ctx=DEFAULT):
    """Roots of lam^2 - trace*lam + det, the '+' root first."""
    disc = _mul(trace, trace) - 4 * det
    s = _sqrt_scalar(disc, ctx)
    half = Fraction(1, 2)
    return (trace + s) * half, (trace - s) * half, disc


def charpoly(K: TensorField11):
    """Coefficients [1, c1, c2, c3, c4] of det(lam I - K) by Faddeev-LeVerrier."""
    n = DIM
    coeffs = [1]
    Mk = TensorField11.identity(K.ctx)
    for k in range(1, n + 1):
        AM = K @ Mk
        c = _mul(Fraction(-1, k), AM.trace())
        coeffs.append(c)
        Mk = AM + TensorField11.identity(K.ctx).scale(c)
    return coeffs


class EigenError(ValueError):
    pass


def eigen_data(K: TensorField11, rules=()):
    """[(eigenvalue, multiplicity)] for operators with doubled 2x2 spectra."""
    if K.is_lift_form(rules):
        A, _, _, _ = K.blocks()
        tr = A[0][0] + A[1][1]
        det = _mul(A[0][0], A[1][1]) - _mul(A[0][1], A[1][0])
        mult = 2
    else:
        c = charpoly(K)
        a = _mul(Fraction(1, 2), c[1])
        b = _mul(Fraction(1, 2), c[2] - _mul(a, a))
        if not (vanishes(c[3] - 2 * _mul(a, b), rules) and vanishes(c[4] - _mul(b, b), rules)):
            raise EigenError("characteristic polynomial is not the square of a quadratic")
        tr, det, mult = -a if not is_zero(a) else 0, b, 2
    l1, l2, disc = quadratic_roots(tr, det, K.ctx)
    if vanishes(disc, rules):
        return [(l1, 2 * mult)]
    return [(l1, mult), (l2, mult)]


def semisimplicity_check(K: TensorField11, eigenvalues, rules=(), name="semisimplicity"):
    """(K - l1 I)(K - l2 I) = 0, i.e. a square-free minimal polynomial."""
    rep = VerificationReport(name)
    lams = [e for e, _ in eigenvalues]
    prod = K.shift(lams[0])
    for lam in lams[1:]:
        prod = prod @ K.shift(lam)
    rep.add(residual_check("minimal_polynomial_square_free", "semisimple: eigenvectors span each tangent space",
                           prod.entries(), rules))
    return rep


def commute_check(K1, K2, rules=(), judge=True, name="commutator"):
    rep = VerificationReport(name)
    res = (K1 @ K2 - K2 @ K1).entries()
    c = residual_check("commutator", "[K1, K2] = 0", res, rules)
    if not judge:
        c = Check(c.ident, c.anchor, RECORDED, c.residual, {"commute": c.status == PASS})
    rep.add(c)
    return rep


# ---------------------------------------------------------- kernels, spans
def _field_echelon(M, rules=()):
    """Reduced row echelon form over the fraction field; returns (rows, pivot columns)."""
    M = [list(r) for r in M]
    nr, nc = len(M), len(M[0])
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if not vanishes(M[i][c], rules)), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        piv = M[r][c]
        M[r] = [cancel(x / piv) if not is_zero(x) else 0 for x in M[r]]
        for i in range(nr):
            if i != r and not vanishes(M[i][c], rules):
                f = M[i][c]
                M[i] = [cancel(a - _mul(f, b)) if not is_zero(b) else a for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return M, pivots


def _bareiss_echelon(M, rules=()):
    """Fraction-free row echelon form over the polynomial ring (exact divisions)."""
    M = [list(r) for r in M]
    nr, nc = len(M), len(M[0])
    prev = 1
    pivots = []
    r = 0
    for c in range(nc):
        p = next((i for i in range(r, nr) if not vanishes(M[i][c], rules)), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        for i in range(r + 1, nr):
            new = []
            for j in range(nc):
                num = _mul(M[r][c], M[i][j]) - _mul(M[i][c], M[r][j])
                if is_number(prev):
                    num = _mul(Fraction(1, 1) / prev, num) if prev != 1 else num
                elif not is_zero(num):
                    q = num.divexact(prev)
                    if q is None:
                        raise ArithmeticError("Bareiss step is not exact")
                    num = q
                new.append(num)
            M[i] = new
        prev = M[r][c]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return M[:r], pivots


def _to_polynomial_rows(M, ctx):
    out = []
    for row in M:
        den = common_denominator(row)
        cleared = [clear_denominator(x, den, ctx) for x in row]
        out.append(cleared)
    return out


def kernel_basis(M, ctx=DEFAULT, rules=()):
    """Basis of the right kernel of a square matrix of scalars, denominators cleared."""
    nc = len(M[0])
    has_ext = any(isinstance(x, QuadExtScalar) and not x.b.is_zero() for r in M for x in r)
    if has_ext:
        E, pivots = _field_echelon(M, rules)
    else:
        P = _to_polynomial_rows(M, ctx)
        E, pivots = _bareiss_echelon(P, rules)
        E, pivots = _field_echelon(E, rules)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * nc
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = -E[r][f] if not is_zero(E[r][f]) else 0
        basis.append(_clear_vector(v, ctx))
    return basis


def _clear_vector(v, ctx):
    den = common_denominator(v)
    if den:
        v = [clear_denominator(x, den, ctx) for x in v]
    return _normalize_vector(v)


def _normalize_vector(v):
    """Divide by the numeric content and make the first nonzero entry have leading coefficient 1."""
    first = next((x for x in v if not is_zero(x)), None)
    if isinstance(first, Polynomial):
        lc = first.leading_coefficient()
        if lc != 1:
            inv = Fraction(1) / Fraction(lc)
            v = [_mul(inv, x) for x in v]
    elif is_number(first) and first != 1:
        inv = Fraction(1) / Fraction(first)
        v = [_mul(inv, x) for x in v]
    return v


def codistribution_basis(K: TensorField11, lam, rules=()):
    """Two one-forms spanning ker(K^T - lam I)."""
    KT = K.transpose().shift(lam)
    basis = kernel_basis(KT.rows, K.ctx, rules)
    if len(basis) != 2:
        raise EigenError(f"expected a rank-2 kernel, found dimension {len(basis)}")
    return [OneForm(v) for v in basis]


def left_eigen_residual(K: TensorField11, lam, sigma: OneForm):
    """(K^T - lam I) sigma componentwise."""
    return list(K.transpose().shift(lam).apply(list(sigma)))


def det3(m):
    return _sum(
        [
            _mul(m[0][0], _mul(m[1][1], m[2][2]) - _mul(m[1][2], m[2][1])),
            -_mul(m[0][1], _mul(m[1][0], m[2][2]) - _mul(m[1][2], m[2][0])),
            _mul(m[0][2], _mul(m[1][0], m[2][1]) - _mul(m[1][1], m[2][0])),
        ]
    )


def in_span(basis, alpha, rules=()):
    """alpha lies in span(basis) for two basis forms: every 3x3 minor of the stacked matrix vanishes."""
    rows = [list(b) for b in basis] + [list(alpha)]
    if len(basis) == 1:
        b = rows[0]
        return all(vanishes(_mul(b[i], alpha[j]) - _mul(b[j], alpha[i]), rules)
                   for i in range(DIM) for j in range(i + 1, DIM))
    from itertools import combinations

    for cols in combinations(range(DIM), 3):
        m = [[r[c] for c in cols] for r in rows]
        if not vanishes(det3(m), rules):
            return False
    return True
