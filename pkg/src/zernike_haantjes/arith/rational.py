"""Rational functions with factored denominators.

There is no multivariate gcd here. A denominator is a multiset of
polynomial factors; syntactically equal factors are merged and each factor
is scaled to leading coefficient 1. Equality is decided by
cross-multiplication.
"""

from __future__ import annotations

from fractions import Fraction

from .context import ContextMismatch
from .polynomial import Polynomial, _is_number, norm_coeff


def _fkey(item):
    return item[0].sort_key()


def _monic(f: Polynomial):
    lc = f.leading_coefficient()
    if lc == 1:
        return f, 1
    return f.scale(Fraction(1) / Fraction(lc)), lc


class RationalFunction:
    __slots__ = ("num", "den", "ctx")

    def __init__(self, num: Polynomial, den=()):
        """``den`` is an iterable of ``(factor, exponent)`` pairs."""
        self.ctx = num.ctx
        factors: dict = {}
        scale = Fraction(1)
        if num.terms:
            for f, k in den:
                if f.ctx is not num.ctx:
                    raise ContextMismatch("denominator factor from another context")
                if k <= 0:
                    raise ValueError("denominator exponents must be positive")
                if f.is_zero():
                    raise ZeroDivisionError("zero denominator factor")
                if f.is_constant():
                    scale *= Fraction(f.constant_value()) ** k
                    continue
                m, lc = _monic(f)
                if lc != 1:
                    scale *= Fraction(lc) ** k
                factors[m] = factors.get(m, 0) + k
        else:
            for f, k in den:
                if f.is_zero():
                    raise ZeroDivisionError("zero denominator factor")
        self.num = num if scale == 1 else num.scale(1 / scale)
        self.den = tuple(sorted(factors.items(), key=_fkey))

    @classmethod
    def from_polynomial(cls, p: Polynomial):
        return cls(p, ())

    @classmethod
    def _raw(cls, num, den):
        obj = object.__new__(cls)
        obj.ctx = num.ctx
        obj.num = num
        obj.den = den if num.terms else ()
        return obj

    # ----------------------------------------------------------------- basics
    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self):
        return not self.den

    def den_poly(self):
        out = Polynomial.constant(self.ctx, 1)
        for f, k in self.den:
            out = out * f ** k
        return out

    def as_polynomial(self):
        if self.den:
            raise ValueError("rational function has a nontrivial denominator")
        return self.num

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.ctx is not self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return other
        if isinstance(other, Polynomial):
            if other.ctx is not self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return RationalFunction._raw(other, ())
        if _is_number(other):
            return RationalFunction._raw(Polynomial.constant(self.ctx, other), ())
        return None

    def equals(self, other):
        """Cross-multiplication test ``num_f*den_g - num_g*den_f == 0``."""
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self.num * o.den_poly() - o.num * self.den_poly()).is_zero()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.equals(o)

    __hash__ = None

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if not self.den and not o.den:
            return RationalFunction._raw(self.num + o.num, ())
        da, db = dict(self.den), dict(o.den)
        common = dict(da)
        for f, k in db.items():
            if common.get(f, 0) < k:
                common[f] = k
        na = self.num
        for f, k in common.items():
            extra = k - da.get(f, 0)
            if extra:
                na = na * f ** extra
        nb = o.num
        for f, k in common.items():
            extra = k - db.get(f, 0)
            if extra:
                nb = nb * f ** extra
        return RationalFunction._raw(na + nb, tuple(sorted(common.items(), key=_fkey)))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        num = self.num * o.num
        if num.is_zero():
            return RationalFunction._raw(num, ())
        if not o.den:
            return RationalFunction._raw(num, self.den)
        if not self.den:
            return RationalFunction._raw(num, o.den)
        merged = dict(self.den)
        for f, k in o.den:
            merged[f] = merged.get(f, 0) + k
        return RationalFunction._raw(num, tuple(sorted(merged.items(), key=_fkey)))

    __rmul__ = __mul__

    def inverse(self):
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFunction(self.den_poly(), ((self.num, 1),)).cancel()

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        num = self.num * o.den_poly()
        den = list(self.den) + [(o.num, 1)]
        return RationalFunction(num, den).cancel()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction._raw(self.num ** n, tuple((f, k * n) for f, k in self.den))

    def cancel(self):
        """Remove denominator factors that divide the numerator exactly.

        This is trial division by factors already present, not a gcd.
        """
        if not self.den or self.num.is_zero():
            return self
        num = self.num
        den = []
        changed = False
        for f, k in self.den:
            while k:
                q = num.divexact(f)
                if q is None:
                    break
                num, k, changed = q, k - 1, True
            if k:
                den.append((f, k))
        if not changed:
            return self
        return RationalFunction._raw(num, tuple(den))

    # --------------------------------------------------------------- calculus
    def diff(self, name):
        dn = self.num.diff(name)
        if not self.den:
            return RationalFunction._raw(dn, ())
        # d(N / prod f^k) = (N' prod f - N sum k f' prod_{g != f} g) / prod f^(k+1)
        facs = [f for f, _ in self.den]
        prod_all = Polynomial.constant(self.ctx, 1)
        for f in facs:
            prod_all = prod_all * f
        acc = dn * prod_all
        for j, (f, k) in enumerate(self.den):
            df = f.diff(name)
            if df.is_zero():
                continue
            others = Polynomial.constant(self.ctx, 1)
            for i, g in enumerate(facs):
                if i != j:
                    others = others * g
            acc = acc - (self.num * df * others).scale(k)
        den = tuple((f, k + 1) for f, k in self.den)
        return RationalFunction._raw(acc, den)

    def integrate(self, name):
        """Antiderivative when the denominator does not involve ``name``."""
        if any(f.depends_on(name) for f, _ in self.den):
            return None
        return RationalFunction._raw(self.num.integrate(name), self.den)

    def depends_on(self, name):
        return self.num.depends_on(name) or any(f.depends_on(name) for f, _ in self.den)

    # --------------------------------------------------------------- helpers
    def evaluate(self, assignment):
        n = self.num.evaluate(assignment)
        d = 1
        for f, k in self.den:
            v = f.evaluate(assignment)
            if v == 0:
                raise ZeroDivisionError(f"denominator factor {f} vanishes at the point")
            d = d * v ** k
        if _is_number(n) and _is_number(d):
            return norm_coeff(Fraction(n) / Fraction(d))
        return n / d

    def subs(self, mapping):
        out = self.num.subs(mapping)
        for f, k in self.den:
            out = out / (f.subs(mapping) ** k)
        if isinstance(out, Polynomial):
            return RationalFunction._raw(out, ())
        return out

    def embed(self, ctx):
        return RationalFunction(self.num.embed(ctx), [(f.embed(ctx), k) for f, k in self.den])

    def rewrite_square(self, name, replacement):
        return RationalFunction._raw(self.num.rewrite_square(name, replacement), self.den)

    def map_numerator(self, fn):
        return RationalFunction._raw(fn(self.num), self.den)

    def __str__(self):
        if not self.den:
            return str(self.num)
        dparts = []
        for f, k in self.den:
            s = f"({f})" if len(f) > 1 or "*" in str(f) else str(f)
            dparts.append(s if k == 1 else f"{s}^{k}")
        return f"({self.num})/({'*'.join(dparts)})"

    def __repr__(self):
        return f"RationalFunction({self})"


def as_rational(x, ctx):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction._raw(x, ())
    if _is_number(x):
        return RationalFunction._raw(Polynomial.constant(ctx, x), ())
    raise TypeError(f"cannot view {type(x).__name__} as a rational function")
