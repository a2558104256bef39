"""Extended point transformations for H_(N): the cross-derivative residual of
the separated-form condition, the product v1 v2 with v = J q, and the
polar-type classification of a candidate Jacobian."""

from __future__ import annotations

from fractions import Fraction

from .arith import DEFAULT, collect, differentiate, evaluate, is_zero, parse, subs
from .models import hamiltonian
from .phase_space import P, Q
from .report import FAIL, PASS, RECORDED, Check, VerificationReport, head, residual_check, vanishes
from .separation import _add, _mul, _simplify, canonical_map

MIXED_P = ("P1", "P2")
MAX_N = 5


class EptCandidate:
    """Momentum-free positions (Q1(q), Q2(q)) with Jacobian J_ij = dQ_i/dq_j."""

    def __init__(self, name, Q1, Q2, ctx=DEFAULT):
        self.name = name
        self.ctx = ctx
        self.Q = [parse(x, ctx) if isinstance(x, str) else x for x in (Q1, Q2)]
        for x in self.Q:
            if any(not vanishes(differentiate(x, p)) for p in P):
                raise ValueError(f"{name}: positions must not depend on the momenta")
        self.J = [[_simplify(differentiate(x, q)) for q in Q] for x in self.Q]
        if vanishes(self.det()):
            raise ValueError(f"{name}: Jacobian is singular")
        q1, q2 = ctx.vars(*Q)
        self.v = [_simplify(_add(_mul(row[0], q1), _mul(row[1], q2))) for row in self.J]

    @classmethod
    def from_map(cls, cmap):
        if any(x is None for x in cmap.Q):
            raise ValueError("candidate needs explicit positions")
        return cls(cmap.name, cmap.Q[0], cmap.Q[1], cmap.ctx)

    def det(self):
        J = self.J
        return _simplify(_mul(J[0][0], J[1][1]) - _mul(J[0][1], J[1][0]))

    def metric12(self):
        """(J J^T)_12 = grad Q1 . grad Q2."""
        J = self.J
        return _simplify(_add(_mul(J[0][0], J[1][0]), _mul(J[0][1], J[1][1])))

    def metric(self):
        J = self.J
        return [[_simplify(_add(_mul(J[i][0], J[j][0]), _mul(J[i][1], J[j][1]))) for j in range(2)]
                for i in range(2)]

    def v_dot_P(self):
        P1, P2 = self.ctx.vars(*MIXED_P)
        return _add(_mul(self.v[0], P1), _mul(self.v[1], P2))

    def __repr__(self):
        return f"EptCandidate({self.name})"


def candidate(name, ctx=DEFAULT) -> EptCandidate:
    """Named witnesses: polar, polar_swapped, identity, or a catalog map name."""
    if name == "polar":
        return EptCandidate("polar", "q2/q1", "q1^2 + q2^2", ctx)
    if name == "polar_swapped":
        return EptCandidate("polar_swapped", "q1^2 + q2^2", "q2/q1", ctx)
    if name == "identity":
        return EptCandidate("identity", "q1", "q2", ctx)
    return EptCandidate.from_map(canonical_map(name, ctx))


def _gammas(N, gammas, ctx):
    if N < 1:
        raise ValueError("N must be at least 1")
    if gammas is None:
        return [ctx.var(f"g{n}") for n in range(1, N + 1)]
    gammas = [parse(g, ctx) if isinstance(g, str) else g for g in gammas]
    if len(gammas) != N:
        raise ValueError(f"expected {N} gamma values, got {len(gammas)}")
    return gammas


def cross_residual(cand: EptCandidate, N, gammas=None):
    """2 (J J^T)_12 + v1 v2 sum_{n=2}^N n(n-1) gamma_n (v.P)^(n-2)."""
    gammas = _gammas(N, gammas, cand.ctx)
    vP = cand.v_dot_P()
    vv = v_product(cand)
    total = 2 * cand.metric12()
    power = 1
    for n in range(2, N + 1):
        if n > 2:
            power = _mul(power, vP)
        total = _add(total, _mul(vv, _mul(gammas[n - 1], power * (n * (n - 1)))))
    return _simplify(total)


def frame_hamiltonian(cand: EptCandidate, N, gammas=None):
    """P^T J J^T P + sum gamma_n (v.P)^n."""
    gammas = _gammas(N, gammas, cand.ctx)
    P1, P2 = cand.ctx.vars(*MIXED_P)
    G = cand.metric()
    H = _add(_mul(G[0][0], P1 ** 2), _mul(2 * G[0][1], P1 * P2), _mul(G[1][1], P2 ** 2))
    vP = cand.v_dot_P()
    power = 1
    for g in gammas:
        power = _mul(power, vP)
        H = _add(H, _mul(g, power))
    return _simplify(H)


def pulled_back_hamiltonian(cand: EptCandidate, N, gammas=None):
    """H_(N)(q, p = J^T P) by direct substitution."""
    ctx = cand.ctx
    H = hamiltonian(N, _gammas(N, gammas, ctx), ctx)
    Ps = ctx.vars(*MIXED_P)
    J = cand.J
    psub = {P[j]: _add(_mul(J[0][j], Ps[0]), _mul(J[1][j], Ps[1])) for j in range(2)}
    return _simplify(subs(H, psub))


def cross_derivative(cand: EptCandidate, N, gammas=None):
    """d^2/dP1 dP2 of the pulled-back Hamiltonian (second route to the residual)."""
    H = pulled_back_hamiltonian(cand, N, gammas)
    return _simplify(differentiate(differentiate(H, "P1"), "P2"))


def v_product(cand: EptCandidate):
    return _simplify(_mul(cand.v[0], cand.v[1]))


def degree_part(x, d, ctx=DEFAULT, names=MIXED_P):
    """Homogeneous part of degree d in ``names`` (denominators free of them)."""
    if is_zero(x):
        return 0
    out = 0
    for exp, c in collect(x, names).items():
        if sum(exp) != d:
            continue
        mono = ctx.const(1)
        for name, k in zip(names, exp):
            mono = mono * ctx.var(name) ** k
        out = _add(out, _mul(c, mono))
    return _simplify(out)


def top_coefficient_residual(cand: EptCandidate, N, gammas=None):
    """Degree N-2 part of the cross residual minus N(N-1) gamma_N v1 v2 (v.P)^(N-2)."""
    gs = _gammas(N, gammas, cand.ctx)
    res = cross_residual(cand, N, gs)
    part = degree_part(res, N - 2, cand.ctx) if N > 2 else _simplify(res - 2 * cand.metric12())
    expected = _mul(v_product(cand), _mul(gs[N - 1], _power(cand.v_dot_P(), N - 2) * (N * (N - 1))))
    return _simplify(part - expected) if not is_zero(part) or not is_zero(expected) else 0


def _power(x, k):
    out = 1
    for _ in range(k):
        out = _mul(out, x)
    return out


def polar_type_check(cand: EptCandidate) -> VerificationReport:
    """Exactly one position is radial-free (grad Q_a . q = 0) and grad Q1 . grad Q2 = 0."""
    rep = VerificationReport(f"polar_type.{cand.name}")
    radial_free = [vanishes(v) for v in cand.v]
    anchor_r = "grad Q_a . q = r dQ_a/dr = 0 for exactly one a"
    if sum(radial_free) == 1:
        a = radial_free.index(True)
        rep.add(Check("radial_free", anchor_r, PASS, "zero",
                      {"angular_index": a + 1, "swapped": a == 1}))
    else:
        rep.add(Check("radial_free", anchor_r, FAIL,
                      "; ".join(f"v{i + 1} = {head(v)}" for i, v in enumerate(cand.v)),
                      {"radial_free": radial_free}))
    rep.add(residual_check("orthogonal", "grad Q1 . grad Q2 = 0", [cand.metric12()]))
    return rep


def _sample_value(x, point):
    val = evaluate(x, point)
    return float(val) if not isinstance(val, complex) else val


def obstruction_report(N=3, ctx=DEFAULT) -> VerificationReport:
    """Witness checks for the EPT obstruction up to N (1 <= N <= 5)."""
    if not 1 <= N <= MAX_N:
        raise ValueError(f"N must lie in 1..{MAX_N}")
    rep = VerificationReport("obstruction", {"N": N})
    polar = candidate("polar", ctx)
    swapped = candidate("polar_swapped", ctx)
    ident = candidate("identity", ctx)
    cart = candidate("cartesian_I2", ctx)

    for cand in (polar, ident, cart):
        with rep.timed():
            a = cross_residual(cand, N)
            b = cross_derivative(cand, N)
            rep.add(residual_check(f"two_routes.{cand.name}", "cross residual = d2 H/dP1 dP2 of the lifted H",
                                   [_simplify(a - b)]))
            h1 = frame_hamiltonian(cand, N)
            h2 = pulled_back_hamiltonian(cand, N)
            rep.add(residual_check(f"frame_hamiltonian.{cand.name}", "H(q, J^T P) = P^T J J^T P + sum g_n (v.P)^n",
                                   [_simplify(h1 - h2)]))

    for n in range(1, N + 1):
        rep.add(residual_check(f"polar_cross.N{n}", "polar-type candidate satisfies the cross condition",
                               [cross_residual(polar, n)]))
    rep.add(residual_check("polar_v_product", "v1 v2 = 0 for polar-type positions", [v_product(polar)]))
    rep.add(residual_check("identity_v_product", "v1 v2 = q1 q2 for the identity",
                           [_simplify(v_product(ident) - ctx.var("q1") * ctx.var("q2"))]))

    # N = 2: single equation 2 (JJ^T)_12 + 2 g2 v1 v2, satisfied by the Cartesian positions
    r2 = cross_residual(cart, 2)
    reduced = _simplify(2 * cart.metric12() + 2 * _mul(ctx.var("g2"), v_product(cart)))
    rep.add(residual_check("n2_reduction", "N = 2 residual is 2 (JJ^T)_12 + 2 g2 v1 v2", [_simplify(r2 - reduced)]))
    rep.add(residual_check("cartesian_N2", "Cartesian positions solve the N = 2 condition", [r2]))

    for k in range(3, N + 1):
        rep.add(residual_check(f"top_coefficient.k{k}", "degree k-2 part is k(k-1) g_k v1 v2 (v.P)^(k-2)",
                               [top_coefficient_residual(cart, k)]))

    if N >= 3:
        res = cross_residual(cart, N)
        lin = degree_part(res, 1, ctx)
        expected = _mul(6 * ctx.var("g3"), _mul(v_product(cart), cart.v_dot_P()))
        rep.add(residual_check("linear_coefficient", "(v.P)^1 coefficient is 6 g3 v1 v2",
                               [_simplify(lin - expected)]))
        vv = v_product(cart)
        point = {"q1": Fraction(1), "q2": Fraction(1), "g2": Fraction(1)}
        value = _sample_value(vv, point)
        status = RECORDED if not vanishes(vv) and value != 0 else FAIL
        rep.add(Check("nonzero_witness", "Cartesian positions have v1 v2 != 0, so the N >= 3 condition fails",
                      status, f"v1 v2 = {value:.12g} at q = (1, 1), g2 = 1",
                      {"v_product": str(vv), "cross_residual_zero": vanishes(res)}))

    for cand, expect in ((polar, True), (swapped, True), (cart, False)):
        sub = polar_type_check(cand)
        ok = sub.passed == expect
        detail = {"polar_type": sub.passed}
        for c in sub.checks:
            if c.ident == "radial_free" and "swapped" in c.detail:
                detail["swapped"] = c.detail["swapped"]
        rep.add(Check(f"polar_type.{cand.name}", "polar-type classification of the candidate",
                      PASS if ok else FAIL, "zero" if ok else f"expected polar_type={expect}", detail))
    return rep
