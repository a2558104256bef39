"""Named verification suites. Each runner takes a parameter dict (only the keys
it declares are read) and returns a VerificationReport."""

from __future__ import annotations

import random
from fractions import Fraction

from .arith import DEFAULT, Polynomial, parse, subs
from .chain_solver import AnsatzSpec, divisor_monomials, filter_haantjes, solve_chain
from .models import (
    catalog,
    catalog_names,
    catalog_report,
    chain_residual,
    elliptic_integral,
    hamiltonian,
    integrals,
    k_rules,
    symmetry_algebra_report,
    uses_k,
)
from .numeric import DEFAULT_SEED, DEFAULT_TOL, numeric_report
from .obstruction import obstruction_report
from .phase_space import COORDS, OneForm, differential, poisson_bracket
from .report import FAIL, PASS, RECORDED, Check, VerificationReport, head, residual_check
from .separation import (
    MAP_NAMES,
    StaeckelEllipticData,
    StepBAnsatz,
    _simplify,
    canonical_map,
    cartesian_forms,
    characteristic_check,
    elliptic_suite,
    exactness_check,
    identity_limit_check,
    ode_singularity_count,
    polar_form,
    pullback_check,
    reparametrize,
    separation_operators_report,
    stepB_conjugate_momentum,
    verify_canonical,
)
from .tensor import TensorField11, haantjes_torsion, haantjes_torsion_invariant, nijenhuis_torsion


class UnknownSuite(KeyError):
    pass


class SuiteDescriptor:
    def __init__(self, name, runner, params=(), description="", expected=PASS):
        self.name = name
        self.runner = runner
        self.params = tuple(params)
        self.description = description
        self.expected = expected

    def run(self, params=None, ctx=DEFAULT) -> VerificationReport:
        params = {k: v for k, v in (params or {}).items() if k in self.params and v is not None}
        rep = self.runner(ctx=ctx, **params)
        rep.name = self.name
        for k, v in params.items():
            rep.params[k] = str(v)
        return rep

    def to_dict(self):
        return {"name": self.name, "params": list(self.params), "description": self.description,
                "expected": self.expected}


def _value(x, ctx):
    if x is None:
        return None
    if isinstance(x, str):
        return parse(x, ctx)
    return x


# ---------------------------------------------------------------- runners
def run_superintegrability(gamma1=None, gamma2=None, ctx=DEFAULT):
    g1 = _value(gamma1, ctx) if gamma1 is not None else ctx.var("g1")
    g2 = _value(gamma2, ctx) if gamma2 is not None else ctx.var("g2")
    rep = VerificationReport("superintegrability")
    H = hamiltonian(2, [g1, g2], ctx)
    J, I1, I2 = integrals(g1, g2, ctx)
    for name, f in (("J", J), ("I1", I1), ("I2", I2)):
        with rep.timed():
            rep.add(residual_check(f"commutes_{name}", f"{{H_(2), {name}}} = 0", [poisson_bracket(H, f)]))
    with rep.timed():
        rep.add(residual_check("dependence", "H_(2) = I1 + I2 - g2 J^2", [H - (I1 + I2 - g2 * J ** 2)]))
    return rep


def run_algebra(gamma1=None, gamma2=None, ctx=DEFAULT):
    return symmetry_algebra_report(gamma1, gamma2, ctx)


def random_tensor(rng, degree=1, ctx=DEFAULT):
    """Tensor field with random integer coefficients, entries of degree <= ``degree``."""
    from .chain_solver import monomials

    monos = monomials(COORDS, degree, ctx)
    rows = []
    for _ in range(4):
        row = []
        for _ in range(4):
            terms = {e: rng.randint(-3, 3) for e in monos}
            row.append(Polynomial(ctx, {e: c for e, c in terms.items() if c}))
        rows.append(row)
    return TensorField11(rows, ctx)


def run_torsion(seed=DEFAULT_SEED, samples=5, ctx=DEFAULT):
    rep = VerificationReport("torsion")
    for name in ("K_J2", "K_I2", "K_I1", "K_e"):
        entry = catalog(name, ctx)
        rules = k_rules(ctx) if uses_k(entry) else ()
        with rep.timed():
            rep.add(residual_check(f"haantjes.{name}", "Haantjes torsion vanishes",
                                   haantjes_torsion(entry.tensor).independent(), rules))
    for name in ("N_I2", "N_I1", "N_e"):
        entry = catalog(name, ctx)
        rules = k_rules(ctx) if uses_k(entry) else ()
        with rep.timed():
            rep.add(residual_check(f"nijenhuis.{name}", "Nijenhuis torsion vanishes",
                                   nijenhuis_torsion(entry.tensor).independent(), rules))
    rng = random.Random(f"{seed}:torsion")
    for s in range(int(samples)):
        L = random_tensor(rng, 1, ctx)
        with rep.timed():
            a = haantjes_torsion(L)
            b = haantjes_torsion_invariant(L)
            rep.add(residual_check(f"formulas_agree.{s}", "coordinate and invariant Haantjes torsion agree",
                                   (a - b).independent()))
    return rep


def run_chain(N=5, ctx=DEFAULT):
    rep = VerificationReport("chain")
    for name in catalog_names():
        entry = catalog(name, ctx)
        if entry.integral is None:
            rep.add(Check(f"{name}", "generator without a chain of its own", RECORDED, "n/a"))
            continue
        rules = k_rules(ctx) if uses_k(entry) else ()
        for n in entry.hamiltonians:
            if n > int(N):
                continue
            H = hamiltonian(n, ctx=ctx)
            I = H if entry.integral == "H" else entry.integral
            with rep.timed():
                rep.add(residual_check(f"{name}.N{n}", "K^T dH = dI", list(chain_residual(entry.tensor, H, I)), rules))
    return rep


def _family_check(rep, ident, anchor, family, target, ctx, rules=()):
    """Membership of the catalog operator, then the Haantjes filter run blind
    (no candidates supplied) must return it among its members."""
    contains = family.contains(target, ctx)
    rep.add(Check(f"{ident}.contains", anchor, PASS if contains else FAIL, "zero" if contains else "not in family",
                  {"dimension": family.dimension, **family.diagnostics}))
    result = filter_haantjes(family, (), ctx, rules=rules)
    exact = [K for _, K in result.members if all(
        residual_check("x", "", [a - b], rules).status == PASS for a, b in zip(K.entries(), target.entries()))]
    ok = len(result.members) >= 1 and bool(exact)
    rep.add(Check(f"{ident}.haantjes_members", "Haantjes filter keeps the catalog operator", PASS if ok else FAIL,
                  "zero" if ok else "catalog operator not among the Haantjes members",
                  {"members": len(result.members), **{k: v for k, v in result.diagnostics.items()}}))
    return result


def run_solver(deg=2, N=5, ctx=DEFAULT):
    deg = int(deg)
    rep = VerificationReport("solver")
    H2 = hamiltonian(2, ctx=ctx)
    J, _, I2 = integrals(ctx=ctx)
    with rep.timed():
        fam = solve_chain(H2, I2, AnsatzSpec(deg), ctx)
        _family_check(rep, "I2", "Step A on (H_(2), I2) recovers K_I2", fam, catalog("K_I2", ctx).tensor, ctx)
    KJ2 = catalog("K_J2", ctx).tensor
    for n in sorted({2, int(N)}):
        with rep.timed():
            fam = solve_chain(hamiltonian(n, ctx=ctx), J ** 2, AnsatzSpec(deg, params=()), ctx)
            _family_check(rep, f"J2.N{n}", "Step A on (H_(N), J^2) recovers K_J2", fam, KJ2, ctx)
    with rep.timed():
        fam = solve_chain(H2, J ** 2 * Fraction(1, 2), AnsatzSpec(deg, params=()), ctx)
        half = fam.contains(KJ2.scale(Fraction(1, 2)), ctx)
        rep.add(Check("J2_half_target", "target J^2/2 yields K_J2/2 (chain is linear in the target)",
                      PASS if half else FAIL, "zero" if half else "K_J2/2 not in family"))
    with rep.timed():
        Ie = elliptic_integral(ctx)
        fam = solve_chain(H2, Ie, AnsatzSpec(deg, param_monomials=divisor_monomials(Ie, ctx=ctx)), ctx)
        _family_check(rep, "Ie", "Step A on (H_(2), I_e) recovers K_e", fam, catalog("K_e", ctx).tensor, ctx,
                      rules=k_rules(ctx))
    with rep.timed():
        fam = solve_chain(H2, ctx.var("q1"), AnsatzSpec(deg), ctx)
        ok = fam.empty and bool(fam.diagnostics.get("uncancelled_monomials"))
        rep.add(Check("inconsistent_target", "I = q1 admits no operator; offending monomials listed",
                      PASS if ok else FAIL, "empty family" if ok else "unexpected solution",
                      {"uncancelled_monomials": fam.diagnostics.get("uncancelled_monomials", [])[:5]}))
    return rep


def run_canonicity(ctx=DEFAULT):
    rep = VerificationReport("canonicity")
    for name in MAP_NAMES:
        cmap = canonical_map(name, ctx)
        with rep.timed():
            rep.extend(verify_canonical(cmap), prefix=name)
    polar = canonical_map("polar", ctx)
    # Q1 = q2/q1 -> phi: f'(x) = 1/(1 + x^2), P1 -> (1 + Q1^2) P1 = J
    angle = reparametrize(polar, 0, "1/(1 + x1^2)", name="polar_angle")
    rep.extend(verify_canonical(angle), prefix="polar_angle")
    J = integrals(ctx=ctx)[0]
    rep.add(residual_check("polar_angle.momentum", "angle momentum is J", [_simplify(angle.P[0] - J)]))
    cart = canonical_map("cartesian_I2", ctx)
    sq = reparametrize(cart, 1, "2*x1", "x1^2", name="cartesian_I2_squared")
    rep.extend(verify_canonical(sq), prefix="cartesian_I2_squared")
    return rep


def run_separated(N=5, ctx=DEFAULT):
    rep = VerificationReport("separated")
    polar = canonical_map("polar", ctx)
    for n in range(1, int(N) + 1):
        with rep.timed():
            rep.add(pullback_check(polar, hamiltonian(n, ctx=ctx), polar_form(n, ctx),
                                   ident=f"polar.N{n}", anchor="H_(N) = p_r^2 + p_phi^2/r^2 + sum g_n (r p_r)^n"))
    J = integrals(ctx=ctx)[0]
    P1 = ctx.var("P1")
    Q1 = ctx.var("Q1")
    rep.add(pullback_check(polar, J, (1 + Q1 ** 2) * P1, ident="polar.J", anchor="p_phi = J"))
    H2 = hamiltonian(2, ctx=ctx)
    _, I1, I2 = integrals(ctx=ctx)
    for k, I in ((2, I2), (1, I1)):
        cmap = canonical_map(f"cartesian_I{k}", ctx)
        Hs, Is = cartesian_forms(k, ctx)
        with rep.timed():
            rep.add(pullback_check(cmap, H2, Hs, ident=f"cartesian_I{k}.H", anchor="H_(2) separated"))
            rep.add(pullback_check(cmap, I, Is, ident=f"cartesian_I{k}.I{k}", anchor=f"I{k} separated"))
    with rep.timed():
        cmap = canonical_map("elliptic", ctx)
        rep.add(pullback_check(cmap, H2, StaeckelEllipticData(ctx).separated_form(),
                               ident="elliptic.staeckel", anchor="H_(2) in Staeckel form with h, g"))
    for name in MAP_NAMES:
        cmap = canonical_map(name, ctx)
        rep.extend(characteristic_check(cmap, ctx), prefix=name)
        rep.extend(identity_limit_check(cmap), prefix=name)
    Q1, Q2, P2, g1, g2 = ctx.vars("Q1", "Q2", "P2", "g1", "g2")
    sep = [P1 ** 2 + g1 * Q1 * P1 + g2 * (Q1 * P1) ** 2, P2 ** 2 + g1 * Q2 * P2 + g2 * (Q2 * P2) ** 2]
    in_coords = [subs(s, {"Q1": ctx.var("q1"), "Q2": ctx.var("q2"), "P1": ctx.var("p1"), "P2": ctx.var("p2")})
                 for s in sep]
    rep.extend(separation_operators_report([in_coords[0] + in_coords[1] / (1 + g2 * ctx.var("q1") ** 2),
                                            in_coords[1]], 0, ctx=ctx), prefix="separated_pair")
    # I1 in the I2-adapted coordinates has no separated form; record its shape only
    cart = canonical_map("cartesian_I2", ctx)
    shift = cart.momentum_shift()
    Jm = cart.jacobian()
    Ps = ctx.vars("P1", "P2")
    psub = {f"p{j + 1}": _simplify(Jm[0][j] * Ps[0] + Jm[1][j] * Ps[1] + shift[j]) for j in range(2)}
    I1_mixed = _simplify(subs(I1, psub))
    rep.add(Check("cartesian_I2.I1_mixed", "I1 in I2-adapted coordinates (fixture only, no reference value)",
                  RECORDED, head(I1_mixed)))
    return rep


def run_elliptic(k1=None, k2=None, gamma1=None, gamma2=None, ctx=DEFAULT):
    spec = {}
    for name, v in (("k1", k1), ("k2", k2), ("g1", gamma1), ("g2", gamma2)):
        if v is not None:
            spec[name] = _value(v, ctx)
    return elliptic_suite(ctx, specialize=spec or None)


def run_ode(ctx=DEFAULT):
    rep = VerificationReport("ode")
    expected = {"elliptic": (4, "Heun"), "polar": (3, "hypergeometric"),
                "cartesian_I2": (3, "hypergeometric"), "cartesian_I1": (3, "hypergeometric")}
    for tag, want in expected.items():
        got = ode_singularity_count(tag, ctx)
        rep.add(Check(tag, "regular singular points of the separated equation", PASS if got == want else FAIL,
                      f"{got[0]} ({got[1]})", {"expected": list(want)}))
    got = ode_singularity_count("elliptic", ctx, k1=0, k2=1)
    rep.add(Check("elliptic_k1_zero", "double root of h at k1 = 0 is counted once",
                  PASS if got == (3, "hypergeometric") else FAIL, f"{got[0]} ({got[1]})"))
    return rep


def run_obstruction(N=3, ctx=DEFAULT):
    return obstruction_report(int(N), ctx)


def run_numeric(seed=DEFAULT_SEED, samples=100, tol=DEFAULT_TOL, ctx=DEFAULT):
    return numeric_report(int(samples), 50, float(tol), int(seed), ctx)


def run_catalog(ctx=DEFAULT):
    return catalog_report(ctx)


def run_stepB(ctx=DEFAULT):
    rep = VerificationReport("stepB")
    q1, q2, p1, p2, g2 = ctx.vars("q1", "q2", "p1", "p2", "g2")
    D = 1 + g2 * q1 ** 2
    J = q1 * p2 - q2 * p1
    zero = ctx.const(0)
    # polar: angle differential, tau from the J^2 co-distribution
    dphi = OneForm((-q2 / (q1 ** 2 + q2 ** 2), q1 / (q1 ** 2 + q2 ** 2), zero, zero))
    cases = [
        ("polar", dphi, OneForm((J, zero, -q1 * q2, q1 ** 2)), J, StepBAnsatz(2, 2, 0)),
        ("cartesian_I2.Q1", differential(q1), OneForm((zero, g2 * q1 * p2, D, g2 * q1 * q2)),
         (p1 + g2 * q1 ** 2 * p1 + g2 * q1 * q2 * p2) / D, StepBAnsatz(2, 2, 2)),
    ]
    for name, dx, tau, expected, ansatz in cases:
        with rep.timed():
            res = stepB_conjugate_momentum(dx, tau, ansatz, ctx=ctx)
            if res.potential is None:
                rep.add(Check(name, "conjugate momentum from the exact form h dx + r tau", FAIL, "no closed form",
                              res.diagnostics))
                continue
            rep.add(residual_check(name, "conjugate momentum from the exact form h dx + r tau",
                                   [_simplify(res.potential - expected)]))
    # Q2 = q2/sqrt(D) with h = 0: momentum p2 sqrt(D)
    from .arith import QuadExtScalar, as_rational

    root = QuadExtScalar.sqrt(D)
    Q2 = _simplify(q2 * root / D)
    with rep.timed():
        res = stepB_conjugate_momentum(differential(Q2), OneForm((g2 * q1 * p2, zero, zero, D)),
                                       StepBAnsatz(2, 2, 2), ctx=ctx)
        expected = QuadExtScalar(as_rational(zero, ctx), as_rational(p2, ctx), D)
        if res.potential is None:
            rep.add(Check("cartesian_I2.Q2", "conjugate momentum from the exact form h dx + r tau", FAIL,
                          "no closed form", res.diagnostics))
        else:
            rep.add(residual_check("cartesian_I2.Q2", "conjugate momentum from the exact form h dx + r tau",
                                   [_simplify(res.potential - expected)]))
    for ident, alpha, want in (("dJ", differential(J), True), ("rotation", OneForm((-q2, q1, zero, zero)), False)):
        closed = exactness_check(alpha).passed
        rep.add(Check(f"exactness.{ident}", "closedness test separates exact from non-exact forms",
                      PASS if closed == want else FAIL, "zero" if closed == want else f"closed={closed}",
                      {"closed": closed}))
    return rep


SUITES = {
    s.name: s
    for s in (
        SuiteDescriptor("superintegrability", run_superintegrability, ("gamma1", "gamma2"),
                        "J, I1, I2 commute with H_(2); dependence relation"),
        SuiteDescriptor("symmetry-algebra", run_algebra, ("gamma1", "gamma2"),
                        "cubic Higgs brackets, Casimir, oscillator branch"),
        SuiteDescriptor("torsion", run_torsion, ("seed", "samples"),
                        "Haantjes and Nijenhuis torsions of the catalog; coordinate vs invariant formula"),
        SuiteDescriptor("chain", run_chain, ("N",), "K^T dH = dI for every catalog pair"),
        SuiteDescriptor("solver", run_solver, ("deg", "N"), "Step A reproduces K_I2, K_J2, K_e"),
        SuiteDescriptor("canonicity", run_canonicity, (), "canonical brackets of all coordinate maps"),
        SuiteDescriptor("separated", run_separated, ("N",), "separated forms in mixed coordinates"),
        SuiteDescriptor("elliptic", run_elliptic, ("k1", "k2", "gamma1", "gamma2"),
                        "elliptic spectrum, discriminant, eigenforms, level sets, Staeckel form"),
        SuiteDescriptor("ode", run_ode, (), "regular singular points of the separated equations"),
        SuiteDescriptor("obstruction", run_obstruction, ("N",), "no extended point transformation for N >= 3"),
        SuiteDescriptor("numeric", run_numeric, ("seed", "samples", "tol"),
                        "geodesic polar spot checks and float cross-checks"),
        SuiteDescriptor("catalog", run_catalog, (), "load-time validation of every catalog operator"),
        SuiteDescriptor("stepB", run_stepB, (), "conjugate momenta from Step B"),
    )
}


def suite(name) -> SuiteDescriptor:
    try:
        return SUITES[name]
    except KeyError:
        raise UnknownSuite(name) from None


def run_suite(name, params=None, ctx=DEFAULT) -> VerificationReport:
    return suite(name).run(params, ctx)
