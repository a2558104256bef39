"""Darboux-Haantjes coordinates: canonical maps, separated forms, Step B
(conjugate momenta), converse separation operators, elliptic data and the
singularity count of the separated quantum equations."""

from __future__ import annotations

import configparser
import itertools
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .arith import (
    DEFAULT,
    Polynomial,
    QuadExtScalar,
    RationalFunction,
    common_denominator,
    clear_denominator,
    differentiate,
    integrate,
    is_number,
    is_zero,
    numerators,
    parse,
    subs,
)
from .linsolve import LinearSystem
from .phase_space import COORDS, OneForm, P, Q, differential, exterior_derivative, poisson_pairing
from .report import FAIL, PASS, RECORDED, Check, VerificationReport, normalize, residual_check, vanishes
from .report import residual_check as _residual_check
from .tensor import EigenError, TensorField11, eigen_data, haantjes_torsion, left_eigen_residual

MAP_NAMES = ("polar", "cartesian_I2", "cartesian_I1", "elliptic", "oscillator_N1")
MIXED_Q = ("Q1", "Q2")
MIXED_P = ("P1", "P2")


def nijenhuis_generator(K: TensorField11) -> TensorField11:
    """K - tr(K)/2 I."""
    return K - TensorField11.identity(K.ctx).scale(K.trace() * Fraction(1, 2))


def _mul(a, b):
    if is_zero(a) or is_zero(b):
        return 0
    return a * b


def _add(*xs):
    total = 0
    for x in xs:
        if not is_zero(x):
            total = x + total
    return total


def _simplify(x):
    """Cancel and drop a zero radical part."""
    if is_number(x):
        return x
    if isinstance(x, QuadExtScalar):
        x = x.cancel()
        if x.b.is_zero():
            return x.a.num if x.a.is_polynomial() else x.a
        return x
    if isinstance(x, RationalFunction):
        x = x.cancel()
        return x.num if x.is_polynomial() else x
    return x


# ------------------------------------------------------------ canonical maps
class CanonicalMap:
    """Forward map (q, p) -> (Q, P).

    A position may be given only through its differential (``Q[i]`` is
    None), which is how transcendental coordinates such as the polar angle
    are represented: brackets only need derivatives.
    """

    def __init__(self, name, Q, P, Q_differentials=None, singular_locus=(), operator=None,
                 identity_at=None, rules=(), note="", ctx=DEFAULT):
        self.name = name
        self.Q = list(Q)
        self.P = list(P)
        self.ctx = ctx
        self._dQ = list(Q_differentials) if Q_differentials else [None, None]
        for i in range(2):
            if self.Q[i] is None and self._dQ[i] is None:
                raise ValueError(f"Q{i + 1} needs an expression or a differential")
        self.singular_locus = list(singular_locus)
        self.operator = operator
        self.identity_at = identity_at
        self.rules = tuple(rules)
        self.note = note

    def dQ(self, i) -> OneForm:
        if self._dQ[i] is None:
            self._dQ[i] = differential(self.Q[i])
        return self._dQ[i]

    def dP(self, i) -> OneForm:
        return differential(self.P[i])

    @property
    def is_ept(self):
        return all(is_zero(self.dQ(i)[k]) for i in range(2) for k in (2, 3))

    def jacobian(self):
        """J_ij = dQ_i/dq_j."""
        return [[self.dQ(i)[j] for j in range(2)] for i in range(2)]

    def momentum_shift(self):
        """s(q) with p = J^T P + s; None if it depends on the momenta."""
        J = self.jacobian()
        shift = []
        for j in range(2):
            s = _simplify(self.ctx.var(P[j]) - _add(_mul(J[0][j], self.P[0]), _mul(J[1][j], self.P[1])))
            if any(not vanishes(differentiate(s, pk)) for pk in P):
                return None
            shift.append(s)
        return shift

    def subs(self, mapping):
        Qs = [None if q is None else _simplify(subs(q, mapping)) for q in self.Q]
        dQs = [None if q is not None else self._dQ[i].map(lambda c: subs(c, mapping)) for i, q in enumerate(self.Q)]
        Ps = [_simplify(subs(p, mapping)) for p in self.P]
        return CanonicalMap(self.name, Qs, Ps, dQs, self.singular_locus, self.operator, None, self.rules,
                            self.note, self.ctx)

    def to_dict(self):
        return {
            "name": self.name,
            "Q": [str(q) if q is not None else f"d: {self._dQ[i]}" for i, q in enumerate(self.Q)],
            "P": [str(p) for p in self.P],
            "is_ept": self.is_ept,
            "singular_locus": [str(s) for s in self.singular_locus],
            "operator": self.operator,
        }

    def __repr__(self):
        return f"CanonicalMap({self.name})"


def _bracket(dF: OneForm, dG: OneForm):
    return poisson_pairing(dF, dG)


def verify_canonical(cmap: CanonicalMap, rules=None) -> VerificationReport:
    """All ten brackets {Q_i,Q_j}, {P_i,P_j} (i <= j) and {Q_i,P_j} against delta_ij."""
    rules = cmap.rules if rules is None else rules
    rep = VerificationReport(f"canonical.{cmap.name}")
    dQ = [cmap.dQ(i) for i in range(2)]
    dP = [cmap.dP(i) for i in range(2)]
    extension = any(isinstance(x, QuadExtScalar) for x in cmap.Q + cmap.P)
    pairs = []
    for i in range(2):
        for j in range(i, 2):
            pairs.append((f"Q{i + 1}_Q{j + 1}", dQ[i], dQ[j], 0))
    for i in range(2):
        for j in range(i, 2):
            pairs.append((f"P{i + 1}_P{j + 1}", dP[i], dP[j], 0))
    for i in range(2):
        for j in range(2):
            pairs.append((f"Q{i + 1}_P{j + 1}", dQ[i], dP[j], 1 if i == j else 0))
    for ident, a, b, delta in pairs:
        with rep.timed() as t:
            res = _bracket(a, b) - delta
            c = residual_check(ident, "{Q_i, Q_j} = {P_i, P_j} = 0, {Q_i, P_j} = delta_ij", [res], rules)
            if isinstance(res, QuadExtScalar):
                nres = normalize(res, rules)
                c.detail = {"rational_part_zero": all(p.is_zero() for p in numerators(nres.a)),
                            "radical_part_zero": all(p.is_zero() for p in numerators(nres.b))}
            elif extension:
                # the radicals cancelled symbolically; the rational part carries the residual
                c.detail = {"rational_part_zero": vanishes(res, rules), "radical_part_zero": True}
            t.add(c)
    return rep


def build_ept_from_lift(K: TensorField11, coordinate_choice=("eigenvalue", "eigenvalue"), rules=(),
                        name="ept", ctx=DEFAULT) -> CanonicalMap:
    """Extended point transformation from the A-block of a lift-form operator.

    ``coordinate_choice`` has one entry per eigenvalue: ``"eigenvalue"``
    (the eigenvalue itself), ``"nijenhuis"`` (eigenvalue of K - tr(K)/2 I),
    a tag of :data:`CHARACTERISTIC_COORDINATES`, or an expression. Every
    chosen Q_i is checked to satisfy A^T dQ_i = lam_i dQ_i for a distinct
    eigenvalue; momenta are P = (J^-1)^T p.
    """
    if not K.is_lift_form(rules):
        raise EigenError("operator is not of lift form (B block nonzero)")
    eig = eigen_data(K, rules)
    if len(eig) < 2:
        raise EigenError("eigenvalues coincide on the whole domain")
    lams = [e for e, _ in eig]
    A = K.blocks()[0]
    trA = A[0][0] + A[1][1]
    Qs, dQs = [], []
    for i, choice in enumerate(coordinate_choice):
        q, dq = _resolve_choice(choice, lams[i], trA, ctx)
        if q is not None and all(not differentiate(q, x) or is_zero(differentiate(q, x)) for x in Q):
            raise EigenError("a constant function cannot parametrise a coordinate chart")
        Qs.append(q)
        dQs.append(dq)
    Ds = [x.D for x in list(Qs) + [c for d in dQs if d is not None for c in d]
          if isinstance(x, QuadExtScalar) and not x.b.is_zero()]
    if Ds:
        lams = [align_discriminant(lam, Ds[0], rules) for lam in lams]
    used = []
    for i in range(2):
        grad = dQs[i] if dQs[i] is not None else differential(Qs[i])
        match = None
        for k, lam in enumerate(lams):
            if k in used:
                continue
            res = [_add(_mul(A[0][j], grad[0]), _mul(A[1][j], grad[1])) - _mul(lam, grad[j]) for j in range(2)]
            if all(vanishes(r, rules) for r in res):
                match = k
                break
        if match is None:
            raise EigenError(f"Q{i + 1} is not a characteristic coordinate of the operator")
        used.append(match)
    cmap = CanonicalMap(name, Qs, [0, 0], dQs, (), None, None, rules, ctx=ctx)
    J = cmap.jacobian()
    det = _simplify(_mul(J[0][0], J[1][1]) - _mul(J[0][1], J[1][0]))
    if vanishes(det, rules):
        raise EigenError("chosen coordinates are functionally dependent")
    p1, p2 = ctx.vars("p1", "p2")
    inv = 1 / det if not is_number(det) else Fraction(1) / det
    P1 = _simplify((_mul(J[1][1], p1) - _mul(J[1][0], p2)) * inv)
    P2 = _simplify((_mul(J[0][0], p2) - _mul(J[0][1], p1)) * inv)
    cmap.P = [P1, P2]
    cmap.pairing = used
    cmap.singular_locus = [det]
    return cmap


def align_discriminant(x, D, rules=()):
    """Rewrite x in sqrt(D) when its own discriminant equals D modulo the rules."""
    if not isinstance(x, QuadExtScalar) or x.b.is_zero() or x.D == D:
        return x
    if vanishes(x.D - D, rules):
        return QuadExtScalar(x.a, x.b, D)
    if vanishes(x.D * 4 - D, rules):
        return QuadExtScalar(x.a, x.b * Fraction(1, 2), D)
    raise ValueError("discriminants differ")


def _resolve_choice(choice, lam, trA, ctx):
    if choice == "eigenvalue":
        return _simplify(lam), None
    if choice == "nijenhuis":
        return _simplify(lam - trA), None
    if isinstance(choice, str) and choice in CHARACTERISTIC_COORDINATES:
        q, dq = CHARACTERISTIC_COORDINATES[choice](ctx)
        return q, dq
    if isinstance(choice, str):
        return parse(choice, ctx), None
    if isinstance(choice, OneForm):
        return None, choice
    return choice, None


def _angle_differential(ctx):
    q1, q2 = ctx.vars("q1", "q2")
    rho2 = q1 ** 2 + q2 ** 2
    z = ctx.const(0)
    return OneForm((-q2 / rho2, q1 / rho2, z, z))


CHARACTERISTIC_COORDINATES = {
    "ratio": lambda ctx: (ctx.var("q2") / ctx.var("q1"), None),
    "radius_squared": lambda ctx: (ctx.var("q1") ** 2 + ctx.var("q2") ** 2, None),
    "radius": lambda ctx: (QuadExtScalar.sqrt(ctx.var("q1") ** 2 + ctx.var("q2") ** 2), None),
    "angle": lambda ctx: (None, _angle_differential(ctx)),
}


def reparametrize(cmap: CanonicalMap, i, derivative, value=None, name=None) -> CanonicalMap:
    """Replace Q_i by f(Q_i) and P_i by P_i / f'(Q_i).

    ``derivative`` is f' as an expression in the auxiliary variable x1;
    ``value`` is f(x1) or None when f is not algebraic (then only the
    differential f'(Q_i) dQ_i is kept).
    """
    ctx = cmap.ctx
    if isinstance(derivative, str):
        derivative = parse(derivative, ctx)
    if isinstance(value, str):
        value = parse(value, ctx)
    if cmap.Q[i] is None:
        raise ValueError("can only reparametrize an explicit coordinate")
    fprime = _simplify(subs(derivative, {"x1": cmap.Q[i]}))
    Qs = list(cmap.Q)
    dQs = [None if q is not None else cmap.dQ(k) for k, q in enumerate(cmap.Q)]
    if value is None:
        Qs[i] = None
        dQs[i] = cmap.dQ(i).map(lambda c: _simplify(_mul(fprime, c)))
    else:
        Qs[i] = _simplify(subs(value, {"x1": cmap.Q[i]}))
        dQs[i] = None
    Ps = list(cmap.P)
    Ps[i] = _simplify(Ps[i] / fprime)
    return CanonicalMap(name or f"{cmap.name}.reparametrized", Qs, Ps, dQs, cmap.singular_locus,
                        cmap.operator, None, cmap.rules, f"Q{i + 1} -> f(Q{i + 1})", ctx)


@lru_cache(maxsize=None)
def _maps_fixture():
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp.read_string(resources.files("zernike_haantjes").joinpath("fixtures", "maps.ini").read_text())
    return cp


def canonical_map(name, ctx=DEFAULT) -> CanonicalMap:
    """Catalog map by name (see :data:`MAP_NAMES`)."""
    from .models import catalog, k_rules

    cp = _maps_fixture()
    if name not in cp:
        raise KeyError(name)
    sec = cp[name]
    rules = k_rules(ctx) if name == "elliptic" else ()
    Qs = [parse(sec["Q1"], ctx), parse(sec["Q2"], ctx)]
    op = sec.get("operator", "none")
    op = None if op == "none" else op
    ident = sec.get("identity_at", "none")
    ident = None if ident == "none" else dict(kv.split("=") for kv in ident.split(","))
    sing = sec.get("singular", "none")
    sing = [] if sing == "none" else [parse(s, ctx) for s in sing.split(";")]
    if sec.get("momenta") == "ept":
        K = catalog(op, ctx).tensor
        built = build_ept_from_lift(K, Qs, rules, name, ctx)
        Ps = built.P
        sing = sing + built.singular_locus
    else:
        Ps = [parse(sec["P1"], ctx), parse(sec["P2"], ctx)]
    Qs = [_simplify(q) for q in Qs]
    Ps = [_simplify(p) for p in Ps]
    return CanonicalMap(name, Qs, Ps, None, sing, op, ident, rules, ctx=ctx)


def characteristic_check(cmap: CanonicalMap, ctx=DEFAULT) -> VerificationReport:
    """(K^T - lam_i) dQ_i = 0 for the generating operator, each Q_i with a distinct eigenvalue."""
    from .models import catalog

    rep = VerificationReport(f"characteristic.{cmap.name}")
    if cmap.operator is None:
        rep.add(Check("codistribution", "no generating operator", RECORDED, "n/a"))
        return rep
    K = catalog(cmap.operator, ctx).tensor
    rules = cmap.rules
    if cmap.name == "elliptic":
        # eigenvalues in the same extension as the coordinates: lam_i = Q_i - T
        T = elliptic_TPS(ctx)[0]
        lams = [cmap.Q[0] - T, cmap.Q[1] - T]
    else:
        lams = [e for e, _ in eigen_data(K, rules)]
    used = set()
    for i in range(2):
        found = None
        for k, lam in enumerate(lams):
            if k in used:
                continue
            res = left_eigen_residual(K, lam, cmap.dQ(i))
            if all(vanishes(r, rules) for r in res):
                found = k
                break
        ok = found is not None
        if ok:
            used.add(found)
        rep.add(Check(f"dQ{i + 1}_characteristic", "dQ_i spans part of ker(K^T - lam_i)", PASS if ok else FAIL,
                      "zero" if ok else "no eigenvalue annihilates dQ_i",
                      {"eigenvalue": str(lams[found]) if ok else None}))
    return rep


def identity_limit_check(cmap: CanonicalMap) -> VerificationReport:
    """The map reduces to the identity at the recorded parameter value."""
    rep = VerificationReport(f"identity_limit.{cmap.name}")
    if not cmap.identity_at:
        rep.add(Check("identity_limit", "no identity limit recorded", RECORDED, "n/a"))
        return rep
    ctx = cmap.ctx
    mapping = {k.strip(): parse(v.strip(), ctx) for k, v in cmap.identity_at.items()}
    lim = cmap.subs(mapping)
    targets = [ctx.var(n) for n in COORDS]
    res = [(lim.Q[i] if lim.Q[i] is not None else 0) - targets[i] for i in range(2)]
    res += [lim.P[i] - targets[2 + i] for i in range(2)]
    rep.add(residual_check("identity_limit", f"map at {cmap.identity_at} is the identity", res))
    return rep


# -------------------------------------------------------- separated forms
def pullback_check(cmap: CanonicalMap, H, claimed, rules=None, ident="pullback", anchor="separated form") -> Check:
    """H(q, p = J^T P + s(q)) - claimed(Q(q), P), identically in (q, P).

    ``claimed`` is written in the mixed symbols Q1, Q2, P1, P2.
    """
    rules = cmap.rules if rules is None else rules
    ctx = cmap.ctx
    if not cmap.is_ept:
        raise ValueError("pullback in mixed coordinates needs momentum-free positions")
    if any(q is None for q in cmap.Q):
        raise ValueError("pullback needs explicit positions")
    shift = getattr(cmap, "shift", None)
    if shift is None:
        shift = cmap.momentum_shift()
        if shift is None:
            raise ValueError("momenta are not affine in p with the Jacobian as linear part")
    J = cmap.jacobian()
    Ps = ctx.vars(*MIXED_P)
    psub = {}
    for j in range(2):
        psub[P[j]] = _add(_mul(J[0][j], Ps[0]), _mul(J[1][j], Ps[1]), shift[j])
    lhs = subs(H, psub)
    rhs = subs(claimed, {MIXED_Q[0]: cmap.Q[0], MIXED_Q[1]: cmap.Q[1]})
    return residual_check(ident, anchor, [_simplify(lhs - rhs)], rules)


def polar_form(N, ctx=DEFAULT):
    """H_(N) in the rational polar chart (Q1 = q2/q1, Q2 = r):
    P_r^2 + P_phi^2 / r^2 + sum gamma_n (r P_r)^n with P_phi = (1 + Q1^2) P1."""
    Q1, Q2, P1, P2 = ctx.vars("Q1", "Q2", "P1", "P2")
    Pphi = (1 + Q1 ** 2) * P1
    H = P2 ** 2 + Pphi ** 2 / Q2 ** 2
    power = ctx.const(1)
    for n in range(1, N + 1):
        power = power * (Q2 * P2)
        H = H + ctx.var(f"g{n}") * power
    return H


def cartesian_forms(k, ctx=DEFAULT):
    """(H_(2), I_k) separated in the coordinates adapted to I_k (k = 1, 2)."""
    Q1, Q2, P1, P2, g1, g2 = ctx.vars("Q1", "Q2", "P1", "P2", "g1", "g2")
    part1 = P1 ** 2 + g1 * Q1 * P1 + g2 * (Q1 * P1) ** 2
    part2 = P2 ** 2 + g1 * Q2 * P2 + g2 * (Q2 * P2) ** 2
    if k == 2:
        return part1 + part2 / (1 + g2 * Q1 ** 2), part2
    if k == 1:
        return part1 / (1 + g2 * Q2 ** 2) + part2, part1
    raise ValueError("k must be 1 or 2")


class StaeckelEllipticData:
    """h(lam) = 4 g2 lam (lam - k2^2)(lam + k1^2), g(lam) = 2 g1 lam (lam - k2^2)."""

    def __init__(self, ctx=DEFAULT):
        self.ctx = ctx
        lam, g1, g2, k1, k2 = ctx.vars("lam", "g1", "g2", "k1", "k2")
        self.h = 4 * g2 * lam * (lam - k2 ** 2) * (lam + k1 ** 2)
        self.g = 2 * g1 * lam * (lam - k2 ** 2)
        self.variable = "lam"

    def at(self, poly, x):
        return subs(poly, {"lam": x})

    def separated_form(self):
        """The Staeckel form in mixed symbols Q1, Q2, P1, P2."""
        Q1, Q2, P1, P2 = self.ctx.vars("Q1", "Q2", "P1", "P2")
        num = (self.at(self.h, Q1) * P1 ** 2 - self.at(self.h, Q2) * P2 ** 2
               + self.at(self.g, Q1) * P1 - self.at(self.g, Q2) * P2)
        return num / (Q1 - Q2)

    def denominator(self):
        """lam1 - lam2 = S."""
        return elliptic_TPS(self.ctx)[2]


def elliptic_TPS(ctx=DEFAULT):
    """(T, P, S) with S = sqrt(T^2 - 4P) in the quadratic extension."""
    q1, q2, g2, k1, k2 = ctx.vars("q1", "q2", "g2", "k1", "k2")
    T = g2 * (q1 ** 2 + k1 ** 2 * q2 ** 2) + k2 ** 2
    Pp = g2 * k1 ** 2 * k2 ** 2 * q2 ** 2
    S = QuadExtScalar.sqrt(T ** 2 - 4 * Pp)
    return T, Pp, S


# ----------------------------------------------------------------- Step B
def exactness_check(alpha: OneForm, rules=(), name="exactness") -> VerificationReport:
    """Closedness: all d_a alpha_b - d_b alpha_a vanish."""
    rep = VerificationReport(name)
    comps = exterior_derivative(alpha)
    bad = [f"d{COORDS[a]}^d{COORDS[b]}" for a, b, r in comps if not vanishes(r, rules)]
    c = residual_check("closed", "d alpha = 0", [r for _, _, r in comps], rules)
    c.detail = {"nonzero_components": bad}
    rep.add(c)
    return rep


class StepBResult:
    def __init__(self, beta, h, r, potential, diagnostics):
        self.beta = beta
        self.h = h
        self.r = r
        self.potential = potential
        self.diagnostics = diagnostics

    @property
    def closed(self):
        return self.beta is not None


class StepBAnsatz:
    """Integrating-term ansatz h = n(q, p) / d for beta = h dx + r tau.

    The denominator d is the common denominator of dx and r tau with every
    exponent raised by one. The numerator n runs over monomials of degree
    <= ``p_degree`` in the momenta times monomials of degree <= ``q_degree``
    + deg(d) in the positions, times parameter monomials up to
    ``param_degree`` in the parameters present in dx and tau. In the
    extension case every monomial also gets a radical-part unknown.
    """

    def __init__(self, q_degree=2, p_degree=2, param_degree=2):
        self.q_degree = q_degree
        self.p_degree = p_degree
        self.param_degree = param_degree


def _free_params(values, ctx):
    names = set()
    for v in values:
        for part in _parts(v):
            for n in part.free_names():
                names.add(n)
    return sorted(n for n in names if n not in COORDS)


def _parts(v):
    if is_number(v):
        return []
    if isinstance(v, Polynomial):
        return [v]
    if isinstance(v, RationalFunction):
        return [v.num] + [f for f, _ in v.den]
    if isinstance(v, QuadExtScalar):
        return _parts(v.a) + _parts(v.b) + [v.D]
    return []


def stepB_conjugate_momentum(dx: OneForm, tau: OneForm, ansatz: StepBAnsatz | None = None, rules=(),
                             ctx=DEFAULT) -> StepBResult:
    """Closed beta = h dx + r tau with r = 1/<dx, P tau>, and a potential y with dy = beta when
    termwise integration succeeds."""
    from .chain_solver import monomials

    ansatz = ansatz or StepBAnsatz()
    diag = {}
    pair = _simplify(poisson_pairing(dx, tau))
    if vanishes(pair, rules):
        return StepBResult(None, None, None, None, {"error": "tau is not transverse to dx"})
    r = _simplify(1 / pair)
    rtau = tau.map(lambda c: _simplify(_mul(r, c)))
    # ansatz for h
    den = common_denominator(list(rtau) + list(dx))
    den = {f: k + 1 for f, k in den.items()}
    den_poly = ctx.const(1)
    for f, k in den.items():
        den_poly = den_poly * f ** k
    D = None
    for v in list(rtau) + list(dx):
        if isinstance(v, QuadExtScalar) and not v.b.is_zero():
            D = v.D
    params = _free_params(list(rtau) + list(dx), ctx)
    qdeg = ansatz.q_degree + (den_poly.total_degree() if den else 0)
    qmons = monomials(Q, qdeg, ctx)
    pmoms = monomials(P, ansatz.p_degree, ctx)
    pmons = monomials(params, ansatz.param_degree, ctx) if params else [ctx.zero_exp]
    basis = []
    for m, mp, pm in itertools.product(qmons, pmoms, pmons):
        e = tuple(a + b + c for a, b, c in zip(m, mp, pm))
        mono = Polynomial(ctx, {e: 1}) / den_poly if den else Polynomial(ctx, {e: 1})
        basis.append((("a", e), mono))
        if D is not None:
            basis.append((("b", e), QuadExtScalar(0, mono, D)))
    diag["unknowns"] = len(basis)
    # d(beta) = dh ^ dx + d(r tau); collect numerators per component
    drt = {(a, b): c for a, b, c in exterior_derivative(rtau)}
    system = LinearSystem()
    for lab, _ in basis:
        system.add_unknown(lab)
    for a in range(4):
        for b in range(a + 1, 4):
            terms = []
            for lab, phi in basis:
                t = _add(_mul(differentiate(phi, COORDS[a]), dx[b]), -_mul(differentiate(phi, COORDS[b]), dx[a]))
                terms.append((lab, t))
            const = drt[(a, b)]
            values = [t for _, t in terms if not is_zero(t)] + ([const] if not is_zero(const) else [])
            if not values:
                continue
            common = common_denominator(values)
            rows = {}
            for lab, t in terms:
                if is_zero(t):
                    continue
                for part, poly in _cleared_parts(t, common, ctx):
                    for e, c in poly.terms.items():
                        rows.setdefault((part, e), {})[lab] = c
            rhs = {}
            if not is_zero(const):
                for part, poly in _cleared_parts(const, common, ctx):
                    for e, c in poly.terms.items():
                        rhs[(part, e)] = -c
                        rows.setdefault((part, e), {})
            for key in sorted(rows, key=lambda k: (k[0], k[1])):
                system.add(rows[key], rhs.get(key, 0), origin=(a, b) + key)
    sol = system.solve()
    if not sol.consistent:
        diag["error"] = "no h in the ansatz closes beta"
        return StepBResult(None, None, r, None, diag)
    h = 0
    lookup = dict(basis)
    for lab, c in sorted(sol.particular.items(), key=lambda kv: str(kv[0])):
        h = _add(h, _mul(c, lookup[lab]))
    h = _simplify(h)
    diag["free_parameters"] = len(sol.nullspace)
    beta = OneForm(_simplify(_add(_mul(h, dx[k]), rtau[k])) for k in range(4))
    y = integrate_exact(beta, rules)
    if y is None:
        diag["potential"] = "not in closed catalog form"
    return StepBResult(beta, h, r, y, diag)


def _cleared_parts(v, common, ctx):
    c = clear_denominator(v, common, ctx)
    if isinstance(c, QuadExtScalar):
        out = []
        for tag, part in (("a", c.a), ("b", c.b)):
            if not part.is_zero():
                out.append((tag, part.num))
        return out
    if is_number(c):
        c = ctx.const(c)
    return [("a", c)]


def integrate_exact(beta: OneForm, rules=()):
    """Potential y with dy = beta by termwise integration (momenta first), or None."""
    y = 0
    for k in (2, 3, 0, 1):
        name = COORDS[k]
        rem = _simplify(beta[k] - differentiate(y, name))
        if vanishes(rem, rules):
            continue
        part = integrate(rem, name)
        if part is None:
            return None
        y = _simplify(_add(y, part))
    if any(not vanishes(beta[k] - differentiate(y, COORDS[k]), rules) for k in range(4)):
        return None
    return y


# --------------------------------------------- converse separation operators
def separation_operators_from_separated(H_list, base=0, ctx=DEFAULT):
    """K_a = sum_i (dH_a/dp_i)/(dH/dp_i) (d/dq^i (x) dq^i + d/dp_i (x) dp_i)."""
    H = H_list[base]
    dHp = [differentiate(H, p) for p in P]
    for i, d in enumerate(dHp):
        if vanishes(d):
            raise ValueError(f"dH/dp{i + 1} vanishes identically")
    ops = []
    for Ha in H_list:
        ratios = [_simplify(differentiate(Ha, P[i]) / dHp[i]) if not is_zero(differentiate(Ha, P[i])) else 0
                  for i in range(2)]
        ops.append(TensorField11.diagonal([ratios[0], ratios[1], ratios[0], ratios[1]], ctx))
    return ops


def separation_operators_report(H_list, base=0, name="separation_operators", rules=(), ctx=DEFAULT):
    from .models import chain_residual
    from .phase_space import check_symplectic_compatibility

    rep = VerificationReport(name)
    ops = separation_operators_from_separated(H_list, base, ctx)
    for a, (K, Ha) in enumerate(zip(ops, H_list)):
        rep.add(residual_check(f"K{a}_haantjes", "diagonal separation operator is Haantjes",
                               haantjes_torsion(K).independent(), rules))
        rep.extend(check_symplectic_compatibility(K, rules), prefix=f"K{a}")
        rep.add(residual_check(f"K{a}_chain", "K^T dH = dH_a", list(chain_residual(K, H_list[base], Ha)), rules))
    return rep


# ------------------------------------------------------------- elliptic
def elliptic_suite(ctx=DEFAULT, with_staeckel=True, specialize=None) -> VerificationReport:
    """Elliptic coordinates: A-block, T/P/S, discriminant, eigenforms, level sets,
    spherical conics, Staeckel form.

    ``specialize`` substitutes parameter values (e.g. a Pythagorean pair k1, k2)
    into every residual; the k rewrite is then dropped, so the identities must
    hold exactly at that point.
    """
    from .models import catalog, hamiltonian, k_rules

    mapping = {k: (parse(v, ctx) if isinstance(v, str) else v) for k, v in (specialize or {}).items()}
    rules = () if mapping else k_rules(ctx)
    rep = VerificationReport("elliptic", {k: str(v) for k, v in mapping.items()})

    def residual_check(ident, anchor, residuals, rules=()):
        if mapping:
            residuals = [_simplify(subs(r, mapping)) for r in residuals]
        return _residual_check(ident, anchor, residuals, rules)
    q1, q2, g1, g2, k1, k2, g, x1, x2, x3 = ctx.vars("q1", "q2", "g1", "g2", "k1", "k2", "g", "x1", "x2", "x3")
    T, Pp, S = elliptic_TPS(ctx)
    half = Fraction(1, 2)
    K = catalog("K_e", ctx).tensor
    A = K.blocks()[0]
    printed = [[-g2 * k1 ** 2 * q2 ** 2, g2 * k1 ** 2 * q1 * q2], [g2 * q1 * q2, -g2 * q1 ** 2 - k2 ** 2]]
    with rep.timed() as t:
        t.add(residual_check("A_block", "A-block of K_e", [A[i][j] - printed[i][j] for i in range(2) for j in range(2)],
                             rules))
    with rep.timed() as t:
        trA = A[0][0] + A[1][1]
        detA = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        t.add(residual_check("charpoly", "lam^2 + T lam + P is the characteristic polynomial of A_e",
                             [trA + T, detA - Pp], rules))
    lt1 = (T + S) * half
    lt2 = (T - S) * half
    lam1, lam2 = lt1 - T, lt2 - T
    with rep.timed() as t:
        t.add(residual_check("vieta", "lt1 + lt2 = T, lt1 lt2 = P", [lt1 + lt2 - T, lt1 * lt2 - Pp], rules))
    with rep.timed() as t:
        N = nijenhuis_generator(K)
        t.add(residual_check("nijenhuis_shift", "N_e = K_e + T I, eigenvalues (T +- S)/2",
                             (N - K - TensorField11.identity(ctx).scale(T)).entries(), rules))
    with rep.timed() as t:
        disc = subs(T ** 2 - 4 * Pp, {"g2": g ** 2})
        fac = (g ** 2 * q1 ** 2 + (g * k1 * q2 + k2) ** 2) * (g ** 2 * q1 ** 2 + (g * k1 * q2 - k2) ** 2)
        t.add(residual_check("discriminant_factored", "T^2 - 4P factors under gamma2 = g^2", [disc - fac]))
    with rep.timed() as t:
        res = []
        for sign in (1, -1):
            pt = {"q1": 0, "q2": sign * k2 / (g * k1)}
            res.append(subs(disc, pt))
        t.add(residual_check("focal_points", "S vanishes at (0, +-k2/(sqrt(gamma2) k1))", res))
    with rep.timed() as t:
        res = []
        for lam in (lam1, lam2):
            sigma = OneForm((g2 * q1 * q2, g2 * k1 ** 2 * q2 ** 2 + lam, 0, 0))
            res += left_eigen_residual(K, lam, sigma)
        t.add(residual_check("sigma_eigenforms", "sigma_i A_e = lam_i sigma_i", res, rules))
    cmap = canonical_map("elliptic", ctx)
    with rep.timed() as t:
        res = []
        for Qi, lam in zip(cmap.Q, (lam1, lam2)):
            sigma = (g2 * q1 * q2, g2 * k1 ** 2 * q2 ** 2 + lam)
            dQ = differential(Qi)
            res.append(dQ[0] * sigma[1] - dQ[1] * sigma[0])
        t.add(residual_check("dQ_parallel_sigma", "dQ_i is proportional to sigma_i", res, rules))
    with rep.timed() as t:
        level = g2 * q1 ** 2 / (lt1 - k2 ** 2) + g2 * k1 ** 2 * q2 ** 2 / lt1 - 1
        t.add(residual_check("level_set", "lt1 on its level set: confocal conic", [level], rules))
    with rep.timed() as t:
        Aq = (lt1 - k2 ** 2) / g2
        Bq = lt1 / g2
        conic = x1 ** 2 / Aq + k1 ** 2 * x2 ** 2 / Bq - x3 ** 2
        proj = subs(conic, {"x1": q1 * x3, "x2": q2 * x3}) / x3 ** 2
        level = g2 * q1 ** 2 / (lt1 - k2 ** 2) + g2 * k1 ** 2 * q2 ** 2 / lt1 - 1
        t.add(residual_check("gnomonic", "xi_i = q_i xi_3 maps the spherical conic to the level set",
                             [proj - level], rules))
    with rep.timed() as t:
        ok = all(isinstance(q, QuadExtScalar) and not q.b.is_zero() for q in cmap.Q)
        sym = [cmap.Q[0] + cmap.Q[1], cmap.Q[0] * cmap.Q[1]]
        ok = ok and all(isinstance(s, QuadExtScalar) and vanishes(s.b, k_rules(ctx)) for s in sym)
        t.add(Check("radical_surrogate", "both coordinates carry the radical, symmetric functions are rational",
                    PASS if ok else FAIL, "zero" if ok else "rational coordinate or irrational symmetric function"))
    if with_staeckel:
        with rep.timed() as t:
            data = StaeckelEllipticData(ctx)
            H2, form, smap = hamiltonian(2, ctx=ctx), data.separated_form(), cmap
            if mapping:
                H2, form, smap = subs(H2, mapping), subs(form, mapping), cmap.subs(mapping)
            t.add(pullback_check(smap, H2, form, rules,
                                 "staeckel_form", "H_(2) in Staeckel form with h, g"))
    return rep


# ------------------------------------------------------ ODE classification
ODE_CLASSES = {3: "hypergeometric", 4: "Heun"}


def distinct_root_count(poly, variable, rules=(), ctx=DEFAULT):
    """Number of distinct roots of a univariate polynomial with parametric coefficients.

    A power of the variable is split off (root 0); the rest must have
    degree <= 2 and is decided through its discriminant.
    """
    from .arith import collect

    coeffs = collect(poly, (variable,))
    by_deg = {}
    for e, c in coeffs.items():
        if not vanishes(c, rules):
            by_deg[e[0]] = c
    if not by_deg:
        raise ValueError("zero polynomial")
    low = min(by_deg)
    rest = {d - low: c for d, c in by_deg.items()}
    deg = max(rest)
    count = 1 if low > 0 else 0
    roots = []
    if deg == 0:
        return count, roots
    if deg == 1:
        return count + 1, roots
    if deg == 2:
        a, b, c = rest.get(2, 0), rest.get(1, 0), rest.get(0, 0)
        disc = _mul(b, b) - 4 * _mul(a, c)
        return count + (1 if vanishes(disc, rules) else 2), roots
    raise NotImplementedError("only cubic-type weights with a root at zero are supported")


def ode_singularity_count(data, ctx=DEFAULT, **specialize):
    """Regular singular points of the separated quantum equation (finite roots of the
    separation weight plus infinity) and the class label."""
    from .models import k_rules

    mapping = {k: (parse(v, ctx) if isinstance(v, str) else v) for k, v in specialize.items()}
    if isinstance(data, StaeckelEllipticData):
        weight, var, rules = data.h, "lam", k_rules(ctx)
    elif data == "elliptic":
        return ode_singularity_count(StaeckelEllipticData(ctx), ctx, **specialize)
    elif data == "polar":
        # radial part (1 + g2 r^2) p_r^2 + m^2/r^2 in s = r^2: weight 4 s (1 + g2 s)
        s, g2 = ctx.vars("x1", "g2")
        weight, var, rules = 4 * s * (1 + g2 * s), "x1", ()
    elif data in ("cartesian_I2", "cartesian_I1"):
        # P^2 coefficient of the separated factor: 1 + g2 Q^2
        x, g2 = ctx.vars("x1", "g2")
        weight, var, rules = 1 + g2 * x ** 2, "x1", ()
    else:
        raise KeyError(data)
    if mapping:
        weight = subs(weight, mapping)
    n, _ = distinct_root_count(weight, var, rules, ctx)
    total = n + 1
    return total, ODE_CLASSES.get(total, "other")
