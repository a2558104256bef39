"""Floating-point spot checks: kappa-dependent trigonometric functions, the
geodesic polar transformation, and float evaluation of exact identities."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from .arith import DEFAULT, QuadExtScalar, differentiate, evaluate, is_number
from .phase_space import COORDS, P, Q
from .report import FAIL, PASS, RECORDED, Check, VerificationReport, float_check

DEFAULT_SEED = 20240611
DEFAULT_TOL = 1e-10
MAGNITUDE_GUARD = 1e8
MAX_TRIES = 50


class TangentPole(ValueError):
    pass


class SampleDomainError(ValueError):
    pass


class KappaFunctions:
    """S_k, C_k, T_k with the three-branch definition (sin/cos, identity, sinh/cosh)."""

    def __init__(self, kappa):
        self.kappa = float(kappa)
        self.root = math.sqrt(abs(self.kappa))

    def S(self, x):
        if self.kappa > 0:
            return math.sin(self.root * x) / self.root
        if self.kappa < 0:
            return math.sinh(self.root * x) / self.root
        return x

    def C(self, x):
        if self.kappa > 0:
            return math.cos(self.root * x)
        if self.kappa < 0:
            return math.cosh(self.root * x)
        return 1.0

    def T(self, x):
        c = self.C(x)
        if abs(c) < 1e-15:
            raise TangentPole(f"C_kappa vanishes at x = {x}")
        return self.S(x) / c

    def domain(self):
        """Open interval of geodesic radii covered by the polar chart."""
        if self.kappa > 0:
            return 0.0, math.pi / (2 * self.root)
        return 0.0, math.inf


def kappa_eval(kappa, x):
    """(S, C, T); T is None at a tangent pole. kappa = 0 gives (x, 1, x)."""
    f = KappaFunctions(kappa)
    if kappa == 0:
        return x, 1, x
    try:
        t = f.T(x)
    except TangentPole:
        t = None
    return f.S(x), f.C(x), t


def kappa_identity_residual(kappa, x):
    """|1/T^2 + kappa - 1/S^2| relative to the largest of the three terms."""
    f = KappaFunctions(kappa)
    s, t = f.S(x), f.T(x)
    lhs = 1 / t ** 2 + f.kappa
    rhs = 1 / s ** 2
    return abs(lhs - rhs) / max(1 / t ** 2, abs(f.kappa), rhs)


def as_complex(g):
    """Accept a number or a (real, imaginary) pair."""
    if isinstance(g, (tuple, list)):
        return complex(float(g[0]), float(g[1]))
    return complex(g)


def geodesic_to_cartesian(kappa, gamma1, rho, phi, prho, pphi):
    """(q1, q2, p1, p2) from geodesic polar variables with the gauge shift in p_rho."""
    f = KappaFunctions(kappa)
    S, C, T = f.S(rho), f.C(rho), f.T(rho)
    shifted = prho - gamma1 / 2 * T
    c, s = math.cos(phi), math.sin(phi)
    q1, q2 = S * c, S * s
    p1 = c / C * shifted - s / S * pphi
    p2 = s / C * shifted + c / S * pphi
    return q1, q2, p1, p2


def _zernike_values(gamma1, gamma2, q1, q2, p1, p2):
    """(H_(2), I1, I2, J) at a point, with the magnitude of the largest term."""
    qp = q1 * p1 + q2 * p2
    conf = 1 + gamma2 * (q1 * q1 + q2 * q2)
    terms = [p1 * p1, p2 * p2, gamma1 * qp, gamma2 * qp * qp]
    H = sum(terms)
    I1 = conf * p1 * p1 + gamma1 * q1 * p1
    I2 = conf * p2 * p2 + gamma1 * q2 * p2
    J = q1 * p2 - q2 * p1
    scale = max(abs(t) for t in terms + [conf * p1 * p1, conf * p2 * p2, gamma1 * q1 * p1, gamma1 * q2 * p2])
    return H, I1, I2, J, scale


def _geodesic_forms(kappa, gamma1, rho, phi, prho, pphi):
    f = KappaFunctions(kappa)
    S, T = f.S(rho), f.T(rho)
    c, s = math.cos(phi), math.sin(phi)
    pot = gamma1 * gamma1 / 4 * T * T
    H = prho ** 2 + pphi ** 2 / S ** 2 - pot
    I1 = (c * prho - s / T * pphi) ** 2 - pot * c * c
    I2 = (s * prho + c / T * pphi) ** 2 - pot * s * s
    return H, I1, I2


def _rel(a, b, scale=0.0):
    return abs(a - b) / max(abs(a), abs(b), scale, 1e-300)


def _branch_kappa(rng, branch):
    if branch > 0:
        return rng.uniform(0.1, 2.0)
    if branch < 0:
        return -rng.uniform(0.1, 2.0)
    return 0.0


def _sample_point(rng, kappa):
    lo, hi = KappaFunctions(kappa).domain()
    hi = min(hi, 3.0)
    # keep a margin from the chart boundary, where T_kappa blows up
    rho = rng.uniform(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo))
    return rho, rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2), rng.uniform(-2, 2)


def geodesic_polar_check(branch, gamma1="real", samples=100, tol=DEFAULT_TOL, seed=DEFAULT_SEED) -> VerificationReport:
    """Compare H_(2), I1, I2 evaluated through the geodesic polar map with their
    geodesic forms, for kappa drawn from one sign branch (gamma2 = -kappa).

    ``gamma1`` is "real", "imaginary" (gamma1 = 2 i omega), a number or a pair.
    """
    rng = random.Random(f"{seed}:{branch}:{gamma1}")
    label = {1: "positive", 0: "zero", -1: "negative"}[branch]
    rep = VerificationReport(f"geodesic_polar.{label}.{gamma1 if isinstance(gamma1, str) else 'fixed'}",
                             {"seed": seed, "samples": samples, "tol": tol})
    worst = {"hamiltonian": 0.0, "I1": 0.0, "I2": 0.0, "dependence": 0.0, "kappa_identity": 0.0}
    resampled = 0
    done = 0
    while done < samples:
        if resampled > MAX_TRIES * samples:
            raise SampleDomainError("too many rejected samples")
        kappa = _branch_kappa(rng, branch)
        if gamma1 == "real":
            g1 = complex(rng.uniform(-2, 2), 0)
        elif gamma1 == "imaginary":
            g1 = complex(0, 2 * rng.uniform(-2, 2))
        else:
            g1 = as_complex(gamma1)
        rho, phi, prho, pphi = _sample_point(rng, kappa)
        try:
            q1, q2, p1, p2 = geodesic_to_cartesian(kappa, g1, rho, phi, prho, pphi)
            geo = _geodesic_forms(kappa, g1, rho, phi, prho, pphi)
        except (TangentPole, ZeroDivisionError):
            resampled += 1
            continue
        if max(abs(x) for x in (q1, q2, p1, p2) + geo) > MAGNITUDE_GUARD:
            resampled += 1
            continue
        H, I1, I2, J, scale = _zernike_values(g1, -kappa, q1, q2, p1, p2)
        worst["hamiltonian"] = max(worst["hamiltonian"], _rel(H, geo[0], scale))
        worst["I1"] = max(worst["I1"], _rel(I1, geo[1], scale))
        worst["I2"] = max(worst["I2"], _rel(I2, geo[2], scale))
        # I1 + I2 - gamma2 p_phi^2 = H in geodesic form
        worst["dependence"] = max(worst["dependence"], _rel(geo[1] + geo[2] + kappa * pphi ** 2, geo[0], scale))
        if kappa != 0:
            worst["kappa_identity"] = max(worst["kappa_identity"], kappa_identity_residual(kappa, rho))
        done += 1
    anchors = {
        "hamiltonian": "H_(2) = p_rho^2 + p_phi^2/S^2 - g1^2 T^2/4",
        "I1": "I1 = (cos p_rho - sin p_phi/T)^2 - g1^2 T^2 cos^2/4",
        "I2": "I2 = (sin p_rho + cos p_phi/T)^2 - g1^2 T^2 sin^2/4",
        "dependence": "I1 + I2 - g2 p_phi^2 = H_(2) in geodesic variables",
        "kappa_identity": "1/T_k^2 + k = 1/S_k^2",
    }
    for key, value in worst.items():
        if key == "kappa_identity" and branch == 0:
            continue
        rep.add(float_check(key, anchors[key], value, tol, {"resampled": resampled}))
    return rep


def kappa_identity_check(branch, samples=100, tol=1e-12, seed=DEFAULT_SEED) -> Check:
    rng = random.Random(f"{seed}:identity:{branch}")
    worst = 0.0
    for _ in range(samples):
        kappa = _branch_kappa(rng, branch)
        rho, _, _, _ = _sample_point(rng, kappa)
        worst = max(worst, kappa_identity_residual(kappa, rho))
    return float_check(f"kappa_identity.{branch:+d}", "1/T_k^2 + k = 1/S_k^2", worst, tol)


def small_kappa_series_check(x=0.7, tol=1e-4) -> Check:
    """(S_k(x) - x)/k -> -x^3/6 as k -> 0 from both sides."""
    worst = 0.0
    for kappa in (1e-6, -1e-6):
        approx = (KappaFunctions(kappa).S(x) - x) / kappa
        worst = max(worst, abs(approx + x ** 3 / 6) / (x ** 3 / 6))
    return float_check("small_kappa_series", "S_k(x) = x - k x^3/6 + O(k^2)", worst, tol)


# ------------------------------------------------------------- float cross-check
def _random_rational(rng, lo=-2, hi=2, den=97):
    return Fraction(rng.randint(lo * den, hi * den), den)


def random_point(rng, names=COORDS + ("g1", "g2"), fixed=None):
    """Random rationals mapped to floats; ``fixed`` values are kept."""
    point = {n: float(_random_rational(rng)) for n in names}
    point.update(fixed or {})
    return point


def _value(x, point, radical_sign=1):
    if is_number(x):
        return float(x)
    v = evaluate(x, point, radical_sign) if isinstance(x, QuadExtScalar) else evaluate(x, point)
    if isinstance(v, complex):
        return v
    return float(v)


class FloatIdentity:
    """lhs(point) == rhs(point); each side is a callable on a float point."""

    def __init__(self, ident, lhs, rhs, names=COORDS + ("g1", "g2"), fixed=None, sampler=None):
        self.ident = ident
        self.lhs = lhs
        self.rhs = rhs
        self.names = names
        self.fixed = fixed or {}
        self.sampler = sampler


def float_cross_check(identity: FloatIdentity, samples=50, tol=DEFAULT_TOL, seed=DEFAULT_SEED,
                      anchor="exact identity evaluated in floats") -> Check:
    rng = random.Random(f"{seed}:{identity.ident}")
    worst = 0.0
    rejected = 0
    done = 0
    while done < samples:
        if rejected > MAX_TRIES * samples:
            raise SampleDomainError(f"{identity.ident}: too many singular samples")
        point = identity.sampler(rng) if identity.sampler else random_point(rng, identity.names, identity.fixed)
        try:
            a, scale_a = _with_scale(identity.lhs(point))
            b, scale_b = _with_scale(identity.rhs(point))
        except (ZeroDivisionError, ValueError, OverflowError):
            rejected += 1
            continue
        if max(abs(a), abs(b), scale_a, scale_b) > MAGNITUDE_GUARD:
            rejected += 1
            continue
        worst = max(worst, _rel(a, b, max(scale_a, scale_b, 1.0)))
        done += 1
    return float_check(identity.ident, anchor, worst, tol, {"samples": samples, "resampled": rejected})


def _with_scale(x):
    if isinstance(x, tuple):
        return x
    return x, abs(x)


def float_bracket(f, g, point, radical_sign=1):
    """{f, g} with each partial derivative evaluated separately in floats.

    Returns (value, largest term magnitude) so relative residuals are taken
    against the natural scale of the sum rather than its cancelled value.
    """
    total = 0.0
    scale = 0.0
    for q, p in zip(Q, P):
        for a, b, sign in ((q, p, 1), (p, q, -1)):
            t = sign * _value(differentiate(f, a), point, radical_sign) * _value(differentiate(g, b), point, radical_sign)
            total += t
            scale = max(scale, abs(t))
    return total, scale


def sample_with_fixed(fixed):
    def sampler(rng):
        return random_point(rng, fixed=fixed)
    return sampler


def elliptic_sampler(rng):
    """Random point with k1 = cos f, k2 = sin f and g2 > 0 (real square root)."""
    angle = rng.uniform(0.2, 1.3)
    point = random_point(rng)
    point["g2"] = abs(point["g2"]) + 0.1
    point.update({"k1": math.cos(angle), "k2": math.sin(angle)})
    return point


def complex_gamma_check(samples=50, seed=DEFAULT_SEED, tol=DEFAULT_TOL) -> Check:
    """{H, J} and the dependence relation at gamma1 = 2 i omega, evaluated with complex floats."""
    rng = random.Random(f"{seed}:complex")
    worst = 0.0
    for _ in range(samples):
        q1, q2, p1, p2 = (rng.uniform(-1, 1) for _ in range(4))
        g1 = complex(0, 2 * rng.uniform(-2, 2))
        g2 = rng.uniform(-0.5, 0.5)
        H, I1, I2, J, scale = _zernike_values(g1, g2, q1, q2, p1, p2)
        worst = max(worst, _rel(H, I1 + I2 - g2 * J * J, scale))
    return float_check("complex_gamma1_dependence", "H = I1 + I2 - g2 J^2 at g1 = 2 i omega", worst, tol)


def _nonzero_witness(ident, expr, fixed, seed, threshold=1e-6) -> Check:
    rng = random.Random(f"{seed}:{ident}")
    point = random_point(rng, COORDS + ("P1", "P2", "g1", "g2", "g3"), fixed)
    value = abs(_value(expr, point))
    status = RECORDED if value > threshold else FAIL
    return Check(ident, "nonzero value at a random point", status, f"|value| = {value:.6e} (threshold {threshold:.0e})")


def cross_check_identities(ctx=DEFAULT):
    """Float versions of the exact identities checked elsewhere."""
    from .models import catalog, catalog_names, hamiltonian, integrals, uses_k
    from .separation import MAP_NAMES, canonical_map

    out = []
    H = hamiltonian(2, ctx=ctx)
    J, I1, I2 = integrals(ctx=ctx)
    g2 = ctx.var("g2")
    out.append(FloatIdentity("dependence", lambda x: _value(H, x), lambda x: _value(I1 + I2 - g2 * J ** 2, x)))
    for name, f in (("J", J), ("I1", I1), ("I2", I2)):
        out.append(FloatIdentity(f"commutes.{name}", lambda x, f=f: float_bracket(H, f, x), lambda x: 0.0))
    for name in catalog_names():
        entry = catalog(name, ctx)
        if entry.integral is None:
            continue
        for N in entry.hamiltonians:
            Hn = hamiltonian(N, ctx=ctx)
            I = Hn if entry.integral == "H" else entry.integral
            out.append(_chain_identity(f"{name}.N{N}", entry.tensor, Hn, I, uses_k(entry)))
    for name in MAP_NAMES:
        cmap = canonical_map(name, ctx)
        if any(x is None for x in cmap.Q):
            continue
        sampler = elliptic_sampler if name == "elliptic" else None
        for i in range(2):
            out.append(FloatIdentity(
                f"canonical.{name}.Q{i + 1}_P{i + 1}",
                lambda x, c=cmap, i=i: float_bracket(c.Q[i], c.P[i], x), lambda x: 1.0, sampler=sampler))
        out.append(FloatIdentity(
            f"canonical.{name}.Q1_P2", lambda x, c=cmap: float_bracket(c.Q[0], c.P[1], x), lambda x: 0.0,
            sampler=sampler))
    return out


def _chain_identity(name, K, Hn, I, with_k):
    def lhs(x):
        # (K^T dH)_j = sum_i K^i_j dH_i, assembled in floats
        dH = [_value(differentiate(Hn, c), x) for c in COORDS]
        vals = []
        scale = 0.0
        for j in range(4):
            total = 0.0
            for i in range(4):
                t = _value(K.rows[i][j], x) * dH[i]
                total += t
                scale = max(scale, abs(t))
            vals.append(total - _value(differentiate(I, COORDS[j]), x))
        return max(abs(v) for v in vals), scale

    sampler = elliptic_sampler if with_k else None
    return FloatIdentity(f"chain.{name}", lhs, lambda x: 0.0, fixed={"g3": 0.5, "g4": 0.25, "g5": 0.125},
                         names=COORDS + ("g1", "g2", "g3", "g4", "g5"), sampler=sampler)


def numeric_report(samples=100, cross_samples=50, tol=DEFAULT_TOL, seed=DEFAULT_SEED, ctx=DEFAULT) -> VerificationReport:
    from .obstruction import candidate, cross_residual

    rep = VerificationReport("numeric", {"seed": seed, "samples": samples, "cross_samples": cross_samples, "tol": tol})
    s, c, t = kappa_eval(0, 2.0)
    rep.add(Check("kappa_eval.flat", "S_0(x) = x, C_0 = 1, T_0(x) = x", PASS if (s, c, t) == (2.0, 1, 2.0) else FAIL,
                  "zero" if (s, c, t) == (2.0, 1, 2.0) else f"{(s, c, t)}"))
    s, c, t = kappa_eval(1, math.pi / 2)
    ok = abs(s - 1) < 1e-15 and abs(c) < 1e-15 and t is None
    rep.add(Check("kappa_eval.pole", "S_1(pi/2) = 1, C_1(pi/2) = 0, tangent pole", PASS if ok else FAIL,
                  "zero" if ok else f"{(s, c, t)}"))
    s, c, t = kappa_eval(-1, 1.0)
    worst = max(abs(s - math.sinh(1)), abs(c - math.cosh(1)), abs(t - math.tanh(1)))
    rep.add(float_check("kappa_eval.hyperbolic", "S_-1 = sinh, C_-1 = cosh, T_-1 = tanh", worst, 1e-15))
    for branch in (1, 0, -1):
        for g in ("real", "imaginary"):
            rep.extend(geodesic_polar_check(branch, g, samples, tol, seed), prefix=f"geodesic.{branch:+d}.{g}")
        if branch:
            rep.add(kappa_identity_check(branch, samples, 1e-12, seed))
    rep.add(small_kappa_series_check())
    rep.add(complex_gamma_check(cross_samples, seed, tol))
    for ident in cross_check_identities(ctx):
        rep.add(float_cross_check(ident, cross_samples, tol, seed))
    res = cross_residual(candidate("cartesian_I2", ctx), 3)
    rep.add(_nonzero_witness("cross_residual.cartesian_N3", res, {"g2": 0.5, "g3": 0.75}, seed))
    return rep
