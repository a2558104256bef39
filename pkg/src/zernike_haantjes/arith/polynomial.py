"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from .context import Context, ContextMismatch


def norm_coeff(c):
    """Store integral coefficients as ``int`` and the rest as ``Fraction``."""
    if type(c) is int:
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, Rational):
        return norm_coeff(Fraction(c.numerator, c.denominator))
    raise TypeError(f"non-rational coefficient {c!r}")


def _is_number(x):
    return isinstance(x, Rational) and not isinstance(x, bool)


def glex_key(exp):
    return (sum(exp), exp)


class Polynomial:
    """Polynomial over Q in the variables of a :class:`Context`.

    ``terms`` maps exponent tuples to nonzero coefficients. Instances are
    treated as immutable.
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms=None):
        self.ctx = ctx
        self.terms = terms if terms is not None else {}
        self._hash = None

    @classmethod
    def constant(cls, ctx, c):
        c = norm_coeff(c)
        return cls(ctx, {ctx.zero_exp: c} if c else {})

    # ------------------------------------------------------------------ basics
    def _check(self, other):
        if other.ctx is not self.ctx:
            raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self):
        return not self.terms or (len(self.terms) == 1 and self.ctx.zero_exp in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get(self.ctx.zero_exp, 0)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ctx is other.ctx and self.terms == other.terms
        if _is_number(other):
            return self.is_constant() and self.terms.get(self.ctx.zero_exp, 0) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ctx.names, frozenset(self.terms.items())))
        return self._hash

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if _is_number(other):
            return Polynomial.constant(self.ctx, other)
        return None

    # -------------------------------------------------------------- arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if not o.terms:
            return self
        if not self.terms:
            return o
        res = dict(self.terms)
        for e, c in o.terms.items():
            v = res.get(e)
            if v is None:
                res[e] = c
            else:
                v = norm_coeff(v + c)
                if v:
                    res[e] = v
                else:
                    del res[e]
        return Polynomial(self.ctx, res)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {e: -c for e, c in self.terms.items()})

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

    def scale(self, c):
        c = norm_coeff(c)
        if not c:
            return Polynomial(self.ctx, {})
        if c == 1:
            return self
        return Polynomial(self.ctx, {e: norm_coeff(v * c) for e, v in self.terms.items()})

    def __mul__(self, other):
        if _is_number(other):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial(self.ctx, {})
        if len(a) < len(b):
            a, b = b, a
        res: dict = {}
        get = res.get
        for eb, cb in b.items():
            for ea, ca in a.items():
                e = tuple([x + y for x, y in zip(ea, eb)])
                v = get(e)
                res[e] = ca * cb if v is None else v + ca * cb
        out = {}
        for e, v in res.items():
            if v:
                out[e] = norm_coeff(v)
        return Polynomial(self.ctx, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if _is_number(other):
            if other == 0:
                raise ZeroDivisionError("polynomial divided by zero")
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, Polynomial):
            from .rational import RationalFunction

            return RationalFunction.from_polynomial(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if _is_number(other):
            from .rational import RationalFunction

            return RationalFunction.from_polynomial(Polynomial.constant(self.ctx, other)) / self
        return NotImplemented

    # ---------------------------------------------------------------- calculus
    def diff(self, name):
        try:
            i = self.ctx.index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}") from None
        res = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                res[ne] = norm_coeff(c * k)
        return Polynomial(self.ctx, res)

    def integrate(self, name):
        """Termwise antiderivative in ``name`` (zero constant of integration)."""
        i = self.ctx.index[name]
        res = {}
        for e, c in self.terms.items():
            k = e[i] + 1
            res[e[:i] + (k,) + e[i + 1:]] = norm_coeff(Fraction(c) / k)
        return Polynomial(self.ctx, res)

    # -------------------------------------------------------------- structure
    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self):
        return min((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name):
        i = self.ctx.index[name]
        return max((e[i] for e in self.terms), default=-1)

    def depends_on(self, name):
        i = self.ctx.index[name]
        return any(e[i] for e in self.terms)

    def free_names(self):
        used = [False] * self.ctx.nvars
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used[i] = True
        return tuple(n for n, u in zip(self.ctx.names, used) if u)

    def sort_key(self):
        return tuple(sorted(self.terms.items()))

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda t: glex_key(t[0]), reverse=True)

    def leading_term(self):
        e = max(self.terms, key=glex_key)
        return e, self.terms[e]

    def leading_coefficient(self):
        return self.leading_term()[1] if self.terms else 0

    def content(self):
        """Positive rational gcd of the coefficients."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            c = Fraction(c)
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Fraction(num, den)

    def embed(self, ctx: Context):
        """Re-express in a context that contains all used variables."""
        if ctx is self.ctx:
            return self
        pos = []
        for n in self.ctx.names:
            pos.append(ctx.index.get(n))
        res = {}
        for e, c in self.terms.items():
            ne = [0] * ctx.nvars
            for i, k in enumerate(e):
                if k:
                    j = pos[i]
                    if j is None:
                        raise ContextMismatch(f"variable {self.ctx.names[i]} missing from {ctx!r}")
                    ne[j] = k
            res[tuple(ne)] = c
        return Polynomial(ctx, res)

    def collect(self, names):
        """Group by monomials in ``names``: ``{exponents: coefficient poly}``."""
        idx = [self.ctx.index[n] for n in names]
        out: dict = {}
        for e, c in self.terms.items():
            key = tuple(e[i] for i in idx)
            rest = list(e)
            for i in idx:
                rest[i] = 0
            out.setdefault(key, {})[tuple(rest)] = c
        return {k: Polynomial(self.ctx, v) for k, v in out.items()}

    # ---------------------------------------------------------------- division
    def divexact(self, other):
        """Exact quotient ``self / other`` or ``None`` if not divisible."""
        self._check(other)
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        if not self.terms:
            return self
        if other.is_constant():
            return self.scale(Fraction(1) / Fraction(other.constant_value()))
        lt_e, lt_c = other.leading_term()
        rem = dict(self.terms)
        quot = {}
        n = len(lt_e)
        while rem:
            e = max(rem, key=glex_key)
            if any(e[i] < lt_e[i] for i in range(n)):
                return None
            qe = tuple(e[i] - lt_e[i] for i in range(n))
            qc = norm_coeff(Fraction(rem[e]) / lt_c)
            quot[qe] = qc
            for oe, oc in other.terms.items():
                te = tuple(qe[i] + oe[i] for i in range(n))
                v = norm_coeff(rem.get(te, 0) - qc * oc)
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return Polynomial(self.ctx, quot)

    def sqrt_exact(self):
        """Polynomial square root with positive leading coefficient, or None."""
        if not self.terms:
            return self
        e0, c0 = self.leading_term()
        if any(k % 2 for k in e0):
            return None
        r0 = _rational_sqrt(Fraction(c0))
        if r0 is None:
            return None
        root_lead_e = tuple(k // 2 for k in e0)
        root = {root_lead_e: norm_coeff(r0)}
        two_lead = 2 * r0
        low = self.min_degree()
        n = len(e0)
        rem = self - Polynomial(self.ctx, dict(root)) ** 2
        while rem.terms:
            e, c = rem.leading_term()
            qe = tuple(e[i] - root_lead_e[i] for i in range(n))
            if any(k < 0 for k in qe) or 2 * sum(qe) < low:
                return None
            qc = norm_coeff(Fraction(c) / two_lead)
            t = Polynomial(self.ctx, {qe: qc})
            cur = Polynomial(self.ctx, dict(root))
            rem = rem - (cur * t).scale(2) - t * t
            root[qe] = qc
        return Polynomial(self.ctx, root)

    # ------------------------------------------------------------- evaluation
    def evaluate(self, assignment):
        """Evaluate with numeric values (int/Fraction/float/complex)."""
        vals = []
        for i, n in enumerate(self.ctx.names):
            vals.append(assignment.get(n))
        total = 0
        for e, c in self.terms.items():
            t = c
            for i, k in enumerate(e):
                if k:
                    v = vals[i]
                    if v is None:
                        raise KeyError(f"no value for variable {self.ctx.names[i]!r}")
                    t = t * v ** k
            total = total + t
        return norm_coeff(total) if _is_number(total) else total

    def subs(self, mapping):
        """Substitute variables by scalars (polynomials, rational functions, ...).

        Variables absent from ``mapping`` are kept.
        """
        if not mapping:
            return self
        idx = {self.ctx.index[n]: v for n, v in mapping.items() if n in self.ctx.index}
        if not idx:
            return self
        powers: dict = {}

        def pw(i, k):
            key = (i, k)
            if key not in powers:
                v = idx[i]
                powers[key] = v ** k if k > 1 else v
            return powers[key]

        kept: dict = {}
        acc = None
        for e, c in self.terms.items():
            rest = list(e)
            factor = None
            for i in idx:
                k = e[i]
                if k:
                    rest[i] = 0
                    f = pw(i, k)
                    factor = f if factor is None else factor * f
            if factor is None:
                kept[e] = c
                continue
            mono = Polynomial(self.ctx, {tuple(rest): c})
            term = factor * mono
            acc = term if acc is None else acc + term
        base = Polynomial(self.ctx, kept)
        return base if acc is None else acc + base

    def rewrite_square(self, name, replacement):
        """Apply the rule ``name**2 -> replacement`` until no power >= 2 remains."""
        i = self.ctx.index[name]
        if all(e[i] < 2 for e in self.terms):
            return self
        kept = {}
        acc = Polynomial(self.ctx, {})
        cache: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            if k < 2:
                kept[e] = c
                continue
            q, r = divmod(k, 2)
            if q not in cache:
                cache[q] = replacement ** q
            rest = e[:i] + (r,) + e[i + 1:]
            acc = acc + cache[q] * Polynomial(self.ctx, {rest: c})
        return acc.rewrite_square(name, replacement) + Polynomial(self.ctx, kept)

    # ---------------------------------------------------------------- printing
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.ctx.names, e) if k
            )
            c = Fraction(c)
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({self})"


def _rational_sqrt(c: Fraction):
    if c < 0:
        return None
    n, d = c.numerator, c.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def rational_sqrt(c):
    return _rational_sqrt(Fraction(c))
