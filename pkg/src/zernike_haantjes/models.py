"""The generalized Zernike family: Hamiltonians, integrals, symmetry algebra,
and the catalog of Haantjes / Nijenhuis operators."""

from __future__ import annotations

import configparser
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .arith import DEFAULT, QuadExtScalar, parse, subs
from .phase_space import OneForm, check_symplectic_compatibility, differential, poisson_bracket
from .report import FAIL, PASS, Check, VerificationReport, residual_check
from .tensor import (
    TensorField11,
    eigen_data,
    haantjes_torsion,
    nijenhuis_torsion,
    semisimplicity_check,
)

MAX_N = 5


def k_rules(ctx=DEFAULT):
    """The rewrite k2^2 -> 1 - k1^2."""
    return (("k2", 1 - ctx.var("k1") ** 2),)


def beta_rules(ctx=DEFAULT):
    """gamma1 = -i*beta handled through gamma1^2 -> -beta^2."""
    return (("g1", -ctx.var("b") ** 2),)


class ZernikeFamily:
    """H_(N) = p1^2 + p2^2 + sum_n gamma_n (q1 p1 + q2 p2)^n."""

    def __init__(self, N, gammas=None, ctx=DEFAULT):
        if N < 1:
            raise ValueError("N must be at least 1")
        if N > MAX_N:
            raise ValueError(f"N is capped at {MAX_N}")
        self.N = N
        self.ctx = ctx
        if gammas is None:
            gammas = [ctx.var(f"g{n}") for n in range(1, N + 1)]
        if len(gammas) != N:
            raise ValueError("need one gamma per power")
        self.gammas = list(gammas)

    @property
    def k_max(self):
        """Highest n with gamma_n not identically zero."""
        for n in range(self.N, 0, -1):
            g = self.gammas[n - 1]
            if not (g == 0 if isinstance(g, (int, Fraction)) else g.is_zero()):
                return n
        return 0

    def hamiltonian(self):
        return hamiltonian(self.N, self.gammas, self.ctx)


def _gamma(g, ctx):
    if isinstance(g, str):
        return parse(g, ctx)
    return g


def hamiltonian(N, gammas=None, ctx=DEFAULT):
    if N < 1:
        raise ValueError("N must be at least 1")
    if gammas is None:
        gammas = [ctx.var(f"g{n}") for n in range(1, N + 1)]
    q1, q2, p1, p2 = ctx.vars("q1", "q2", "p1", "p2")
    s = q1 * p1 + q2 * p2
    H = p1 ** 2 + p2 ** 2
    power = ctx.const(1)
    for g in gammas:
        power = power * s
        H = H + _gamma(g, ctx) * power
    return H


def integrals(gamma1=None, gamma2=None, ctx=DEFAULT):
    """(J, I1, I2)."""
    g1 = ctx.var("g1") if gamma1 is None else _gamma(gamma1, ctx)
    g2 = ctx.var("g2") if gamma2 is None else _gamma(gamma2, ctx)
    q1, q2, p1, p2 = ctx.vars("q1", "q2", "p1", "p2")
    J = q1 * p2 - q2 * p1
    conf = 1 + g2 * (q1 ** 2 + q2 ** 2)
    I1 = conf * p1 ** 2 + g1 * q1 * p1
    I2 = conf * p2 ** 2 + g1 * q2 * p2
    return J, I1, I2


def elliptic_integral(ctx=DEFAULT):
    """I_e = -gamma2 k1^2 J^2 - k2^2 I2."""
    J, _, I2 = integrals(ctx=ctx)
    g2, k1, k2 = ctx.vars("g2", "k1", "k2")
    return -g2 * k1 ** 2 * J ** 2 - k2 ** 2 * I2


def generators(gamma1=None, gamma2=None, ctx=DEFAULT):
    """X1 = J/2, X2 = (I1 - I2)/2, X3 = {X1, X2}."""
    J, I1, I2 = integrals(gamma1, gamma2, ctx)
    X1 = J * Fraction(1, 2)
    X2 = (I1 - I2) * Fraction(1, 2)
    X3 = poisson_bracket(X1, X2)
    return X1, X2, X3


def casimir_polynomial(X1, X2, X3, H, g1, g2):
    """C = X2^2 + X3^2 - (g1^2 + 2 g2 H) X1^2 - 4 g2^2 X1^4."""
    return X2 ** 2 + X3 ** 2 - (g1 ** 2 + 2 * g2 * H) * X1 ** 2 - 4 * g2 ** 2 * X1 ** 4


def chain_residual(K: TensorField11, H, I) -> OneForm:
    """K^T dH - dI."""
    return K.transpose_apply(differential(H)) - differential(I)


# ------------------------------------------------------------------ catalog
class OperatorCatalogEntry:
    def __init__(self, name, kind, tensor, integral, hamiltonians, eigenvalues, generator=None, note=""):
        self.name = name
        self.kind = kind
        self.tensor = tensor
        self.integral = integral
        self.hamiltonians = hamiltonians
        self.eigenvalues = eigenvalues
        self.generator = generator
        self.note = note

    def __repr__(self):
        return f"OperatorCatalogEntry({self.name!r}, {self.kind})"


class UnknownEntry(KeyError):
    pass


def _read_fixture(name):
    text = resources.files("zernike_haantjes").joinpath("fixtures", name).read_text()
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=None)
    cp.optionxform = str
    cp.read_string(text)
    return cp


def _parse_rows(sec, ctx):
    rows = []
    for i in range(1, 5):
        rows.append([parse(e.strip(), ctx) for e in sec[f"row{i}"].split("|")])
    return TensorField11(rows, ctx)


@lru_cache(maxsize=None)
def _load_raw(ctx=DEFAULT):
    cp = _read_fixture("catalog.ini")
    out = {}
    for name in cp.sections():
        sec = cp[name]
        K = _parse_rows(sec, ctx)
        integral = sec.get("integral", "none").strip()
        hams = [int(x) for x in sec.get("hamiltonians", "").replace(",", " ").split()]
        if integral == "H":
            integral_val = "H"
        elif integral == "none":
            integral_val = None
        else:
            integral_val = parse(integral, ctx)
        eigs = [parse(e.strip(), ctx) for e in sec.get("eigenvalues", "").split(";") if e.strip()]
        out[name] = OperatorCatalogEntry(
            name, sec["kind"], K, integral_val, hams, eigs, sec.get("generator")
        )
    return out


def k_e_operator(ctx=DEFAULT):
    """K_e = -gamma2 k1^2 K_J2 - k2^2 K_I2."""
    raw = _load_raw(ctx)
    g2, k1, k2 = ctx.vars("g2", "k1", "k2")
    return raw["K_J2"].tensor.scale(-g2 * k1 ** 2) + raw["K_I2"].tensor.scale(-(k2 ** 2))


def catalog_names():
    return list(_load_raw(DEFAULT).keys()) + ["K_e", "N_e"]


def catalog(name, ctx=DEFAULT, **specialize):
    """Catalog entry by name; keyword arguments substitute parameter values (e.g. g2=0)."""
    from .separation import nijenhuis_generator

    raw = _load_raw(ctx)
    if name in raw:
        e = raw[name]
    elif name == "K_e":
        K = k_e_operator(ctx)
        e = OperatorCatalogEntry("K_e", "haantjes", K, elliptic_integral(ctx), [2], [])
    elif name == "N_e":
        K = nijenhuis_generator(k_e_operator(ctx))
        e = OperatorCatalogEntry("N_e", "nijenhuis", K, None, [], [], "K_e")
    else:
        raise UnknownEntry(name)
    if not specialize:
        return e
    mapping = {k: (parse(v, ctx) if isinstance(v, str) else v) for k, v in specialize.items()}
    K = e.tensor.subs(mapping)
    integral = e.integral if e.integral is None or isinstance(e.integral, str) else subs(e.integral, mapping)
    eigs = [subs(x, mapping) for x in e.eigenvalues]
    return OperatorCatalogEntry(e.name, e.kind, K, integral, e.hamiltonians, eigs, e.generator)


def uses_k(entry):
    return entry.name in ("K_e", "N_e")


def validate_entry(entry: OperatorCatalogEntry, ctx=DEFAULT) -> VerificationReport:
    """Load-time assertions: compatibility, torsion, chain, semisimplicity, spectrum."""
    rules = k_rules(ctx) if uses_k(entry) else ()
    rep = VerificationReport(f"catalog.{entry.name}")
    K = entry.tensor
    rep.extend(check_symplectic_compatibility(K, rules), prefix="compatibility")
    if entry.kind == "nijenhuis":
        rep.add(residual_check("nijenhuis_torsion", "Nijenhuis torsion vanishes",
                               nijenhuis_torsion(K).independent(), rules))
    rep.add(residual_check("haantjes_torsion", "Haantjes torsion vanishes",
                           haantjes_torsion(K).independent(), rules))
    if entry.integral is None:
        rep.add(Check("chain", "generator K - tr(K)/2 I carries no chain of its own", "recorded", "n/a"))
    else:
        for N in entry.hamiltonians:
            H = hamiltonian(N, ctx=ctx)
            I = H if entry.integral == "H" else entry.integral
            res = chain_residual(K, H, I)
            rep.add(residual_check(f"chain_N{N}", "K^T dH = dI", list(res), rules))
    eig = eigen_data(K, rules)
    rep.extend(semisimplicity_check(K, eig, rules), prefix="spectrum")
    if entry.eigenvalues:
        got = [e for e, _ in eig]
        ok = len(got) == len(entry.eigenvalues) and all(
            any(residual_check("e", "", [g - w], rules).status == PASS for g in got)
            for w in entry.eigenvalues
        )
        rep.add(Check("eigenvalues", "recorded spectrum", PASS if ok else FAIL,
                      "zero" if ok else "mismatch", {"computed": [str(g) for g in got]}))
    return rep


def catalog_report(ctx=DEFAULT) -> VerificationReport:
    rep = VerificationReport("catalog")
    for name in catalog_names():
        rep.extend(validate_entry(catalog(name, ctx), ctx), prefix=name)
    return rep


# ---------------------------------------------------------- symmetry algebra
def oscillator_map(ctx=DEFAULT):
    """Old (q, p) in terms of barred variables (written q1..p2):
    q = sqrt2 qb, p = (pb - gamma1 qb)/sqrt2 (from gamma1 = -i beta)."""
    two = ctx.const(2)
    r2 = QuadExtScalar.sqrt(two)
    half_r2 = QuadExtScalar(0, Fraction(1, 2), two)
    q1, q2, p1, p2, g1 = ctx.vars("q1", "q2", "p1", "p2", "g1")
    return {
        "q1": r2 * q1,
        "q2": r2 * q2,
        "p1": half_r2 * (p1 - g1 * q1),
        "p2": half_r2 * (p2 - g1 * q2),
    }


def oscillator_forms(ctx=DEFAULT):
    """(Hbar, X1bar, X2bar, X3bar) in the barred variables with beta = b."""
    q1, q2, p1, p2, b = ctx.vars("q1", "q2", "p1", "p2", "b")
    Hb = (p1 ** 2 + p2 ** 2) * Fraction(1, 2) + b ** 2 * (q1 ** 2 + q2 ** 2) * Fraction(1, 2)
    X1 = (q1 * p2 - q2 * p1) * Fraction(1, 2)
    X2 = (p1 ** 2 + b ** 2 * q1 ** 2 - p2 ** 2 - b ** 2 * q2 ** 2) * Fraction(1, 4)
    X3 = (p1 * p2 + b ** 2 * q1 * q2) * Fraction(1, 2)
    return Hb, X1, X2, X3


def _collapse(x):
    """A QuadExt value with zero radical part as a plain rational function."""
    if isinstance(x, QuadExtScalar) and x.b.is_zero():
        return x.a
    return x


def symmetry_algebra_report(gamma1=None, gamma2=None, ctx=DEFAULT) -> VerificationReport:
    rep = VerificationReport("symmetry-algebra")
    g1 = ctx.var("g1") if gamma1 is None else _gamma(gamma1, ctx)
    g2 = ctx.var("g2") if gamma2 is None else _gamma(gamma2, ctx)
    H = hamiltonian(2, [g1, g2], ctx)
    X1, X2, X3 = generators(g1, g2, ctx)
    X3_fixture = _x3_fixture(ctx)
    if gamma1 is not None or gamma2 is not None:
        X3_fixture = subs(X3_fixture, {"g1": g1, "g2": g2})
    rep.add(residual_check("bracket_X1_X2", "{X1, X2} = X3 (expanded X3 recorded in fixture)",
                           [X3 - X3_fixture]))
    rep.add(residual_check("bracket_X3_X1", "{X3, X1} = X2", [poisson_bracket(X3, X1) - X2]))
    rhs = -(g1 ** 2 + 2 * g2 * H) * X1 - 8 * g2 ** 2 * X1 ** 3
    rep.add(residual_check("bracket_X2_X3", "{X2, X3} = -(g1^2 + 2 g2 H) X1 - 8 g2^2 X1^3",
                           [poisson_bracket(X2, X3) - rhs]))
    C = casimir_polynomial(X1, X2, X3, H, g1, g2)
    rep.add(residual_check("casimir", "quartic Casimir equals H^2/4 in the realization",
                           [C - H ** 2 * Fraction(1, 4)]))
    # C as a polynomial in abstract generators y1, y2, y3 (H treated as central)
    half = Fraction(1, 2)
    dC = {
        "X1": -2 * (g1 ** 2 + 2 * g2 * H) * X1 - 16 * g2 ** 2 * X1 ** 3,
        "X2": 2 * X2,
        "X3": 2 * X3,
    }
    rep.add(residual_check(
        "half_gradient", "each bracket is half the Casimir gradient along the missing generator",
        [poisson_bracket(X1, X2) - dC["X3"] * half,
         poisson_bracket(X3, X1) - dC["X2"] * half,
         poisson_bracket(X2, X3) - dC["X1"] * half]))
    # gamma2 = 0 branch, gamma1 = -i beta
    osc = oscillator_map(ctx)
    rules = beta_rules(ctx)
    H1 = hamiltonian(1, [ctx.var("g1")], ctx)
    Y1, Y2, _ = generators(None, 0, ctx)
    Hb, B1, B2, B3 = oscillator_forms(ctx)
    pulled = [_collapse(subs(f, osc)) for f in (H1, Y1, Y2)]
    rep.add(residual_check("oscillator_pullback", "the N = 1 map takes H, X1, X2 to the oscillator forms",
                           [pulled[0] - Hb, pulled[1] - B1, pulled[2] - B2], rules))
    b = ctx.var("b")
    rep.add(residual_check("oscillator_algebra", "{X1b, X2b} = X3b, {X3b, X1b} = X2b, {X2b, X3b} = b^2 X1b",
                           [poisson_bracket(B1, B2) - B3, poisson_bracket(B3, B1) - B2,
                            poisson_bracket(B2, B3) - b ** 2 * B1]))
    rep.add(residual_check("oscillator_casimir", "b^2 X1b^2 + X2b^2 + X3b^2 = Hb^2/4",
                           [b ** 2 * B1 ** 2 + B2 ** 2 + B3 ** 2 - Hb ** 2 * Fraction(1, 4)]))
    return rep


@lru_cache(maxsize=None)
def _x3_fixture(ctx=DEFAULT):
    cp = _read_fixture("algebra.ini")
    return parse(cp["generators"]["X3"], ctx)
