"""Kind-agnostic helpers over numbers, polynomials, rational functions and
quadratic-extension scalars."""

from __future__ import annotations

from fractions import Fraction

from .polynomial import Polynomial, _is_number
from .quadext import QuadExtScalar
from .rational import RationalFunction, as_rational

Scalar = "int | Fraction | Polynomial | RationalFunction | QuadExtScalar"


def is_number(x):
    return _is_number(x)


def poly_arith(lhs: Polynomial, rhs: Polynomial, kind: str) -> Polynomial:
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    raise ValueError(f"unknown operation {kind!r}")


def differentiate(f, name):
    if _is_number(f):
        return 0
    return f.diff(name)


def is_zero(f) -> bool:
    if _is_number(f):
        return f == 0
    return f.is_zero()


def equals(f, g) -> bool:
    """Exact equality; rational functions compare by cross-multiplication."""
    if isinstance(f, RationalFunction) and isinstance(g, RationalFunction):
        return f.equals(g)
    return is_zero(f - g)


def evaluate(f, assignment, radical_sign=1):
    if _is_number(f):
        return f
    if isinstance(f, QuadExtScalar):
        return f.evaluate(assignment, radical_sign)
    return f.evaluate(assignment)


def subs(f, mapping):
    if _is_number(f):
        return f
    return f.subs(mapping)


def rewrite_square(f, name, replacement):
    if _is_number(f):
        return f
    return f.rewrite_square(name, replacement)


def cancel(f):
    if isinstance(f, (RationalFunction, QuadExtScalar)):
        return f.cancel()
    return f


def depends_on(f, name):
    if _is_number(f):
        return False
    return f.depends_on(name)


def integrate(f, name):
    """Termwise antiderivative or ``None`` when the variable sits in a denominator."""
    if isinstance(f, Polynomial):
        return f.integrate(name)
    return f.integrate(name)


def collect(f, names):
    """Coefficients of monomials in ``names``; denominators must be free of them.

    Returns ``{exponents: scalar}``.
    """
    if isinstance(f, Polynomial):
        return f.collect(names)
    if isinstance(f, RationalFunction):
        for fac, _ in f.den:
            if any(fac.depends_on(n) for n in names):
                raise ValueError("denominator depends on a collected variable")
        return {k: RationalFunction._raw(v, f.den) for k, v in f.num.collect(names).items()}
    if isinstance(f, QuadExtScalar):
        if not f.b.is_zero() and any(f.D.depends_on(n) for n in names):
            raise ValueError("discriminant depends on a collected variable")
        out = {}
        for k, v in collect(f.a, names).items():
            out[k] = QuadExtScalar(v, 0, f.D)
        for k, v in collect(f.b, names).items():
            out[k] = out.get(k, QuadExtScalar(0, 0, f.D)) + QuadExtScalar(0, v, f.D)
        return out
    raise TypeError(f"cannot collect {type(f).__name__}")


def numerators(f):
    """Polynomials whose joint vanishing is equivalent to ``f == 0``."""
    if _is_number(f):
        return []
    if isinstance(f, Polynomial):
        return [f]
    if isinstance(f, RationalFunction):
        return [f.num]
    return [f.a.num, f.b.num]


def common_denominator(values):
    """Least syntactic common multiple of the denominators of ``values``."""
    common: dict = {}
    for v in values:
        for part in _rational_parts(v):
            for fac, k in part.den:
                if common.get(fac, 0) < k:
                    common[fac] = k
    return common


def _rational_parts(v):
    if isinstance(v, RationalFunction):
        return [v]
    if isinstance(v, QuadExtScalar):
        return [v.a, v.b]
    return []


def clear_denominator(v, common, ctx):
    """Multiply ``v`` by the factor product ``common``; result has polynomial parts."""
    if _is_number(v):
        v = Polynomial.constant(ctx, v)
    if isinstance(v, Polynomial):
        v = as_rational(v, ctx)

    def clear(rf):
        own = dict(rf.den)
        num = rf.num
        for fac, k in common.items():
            extra = k - own.get(fac, 0)
            if extra < 0:
                raise ValueError("common denominator does not cover value")
            if extra:
                num = num * fac ** extra
        return num

    if isinstance(v, RationalFunction):
        return clear(v)
    return QuadExtScalar(clear(v.a), clear(v.b), v.D)


def lift(x, ctx, D=None):
    """View ``x`` as a scalar of the richest kind needed (QuadExt if D given)."""
    if D is not None:
        if isinstance(x, QuadExtScalar):
            return x
        return QuadExtScalar(as_rational(x, ctx), 0, D)
    if isinstance(x, (RationalFunction, QuadExtScalar)):
        return x
    return as_rational(x, ctx)


def as_fraction(x):
    return Fraction(x)
