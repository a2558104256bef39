"""Elements a + b*sqrt(D) over the rational-function field."""

from __future__ import annotations

import math
from fractions import Fraction

from .context import ContextMismatch
from .polynomial import Polynomial, _is_number, rational_sqrt
from .rational import RationalFunction, as_rational


class DiscriminantMismatch(ValueError):
    pass


class NegativeDiscriminant(ValueError):
    pass


class QuadExtScalar:
    """``a + b*sqrt(D)`` with ``a``, ``b`` rational functions and ``D`` a polynomial.

    All elements combined in one computation must share ``D``; an element
    whose radical part is zero is compatible with any discriminant.
    """

    __slots__ = ("a", "b", "D", "ctx")

    def __init__(self, a, b, D: Polynomial):
        self.ctx = D.ctx
        self.a = as_rational(a, self.ctx)
        self.b = as_rational(b, self.ctx)
        self.D = D
        if self.a.ctx is not self.ctx or self.b.ctx is not self.ctx:
            raise ContextMismatch("parts and discriminant live in different contexts")

    @classmethod
    def sqrt(cls, D: Polynomial):
        """The element sqrt(D) itself."""
        return cls(0, 1, D)

    # ----------------------------------------------------------------- basics
    def is_zero(self):
        return self.a.is_zero() and self.b.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_rational(self):
        return self.b.is_zero()

    def _coerce(self, other):
        if isinstance(other, QuadExtScalar):
            if other.ctx is not self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            if other.D != self.D:
                if other.b.is_zero():
                    return QuadExtScalar(other.a, 0, self.D)
                if self.b.is_zero():
                    return None
                raise DiscriminantMismatch(f"sqrt({self.D}) vs sqrt({other.D})")
            return other
        if isinstance(other, (RationalFunction, Polynomial)) or _is_number(other):
            return QuadExtScalar(as_rational(other, self.ctx), 0, self.D)
        return None

    def _pair(self, other):
        o = self._coerce(other)
        if o is None and isinstance(other, QuadExtScalar) and self.b.is_zero():
            return QuadExtScalar(self.a, 0, other.D), other
        return self, o

    def equals(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        return (s - o).is_zero()

    def __eq__(self, other):
        r = self.equals(other)
        return r

    __hash__ = None

    # ------------------------------------------------------------- arithmetic
    def __add__(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        return QuadExtScalar(s.a + o.a, s.b + o.b, s.D)

    __radd__ = __add__

    def __neg__(self):
        return QuadExtScalar(-self.a, -self.b, self.D)

    def __sub__(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        return QuadExtScalar(s.a - o.a, s.b - o.b, s.D)

    def __rsub__(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        return o - s

    def __mul__(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        if o.b.is_zero():
            return QuadExtScalar(s.a * o.a, s.b * o.a, s.D)
        if s.b.is_zero():
            return QuadExtScalar(s.a * o.a, s.a * o.b, s.D)
        a = s.a * o.a + s.b * o.b * s.D
        b = s.a * o.b + s.b * o.a
        return QuadExtScalar(a, b, s.D)

    __rmul__ = __mul__

    def conjugate(self):
        return QuadExtScalar(self.a, -self.b, self.D)

    def norm(self):
        """a^2 - b^2 D, a rational function."""
        return self.a * self.a - self.b * self.b * self.D

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.b.is_zero():
            return QuadExtScalar(self.a.inverse(), 0, self.D)
        if self.a.is_zero():
            # 1/(b sqrt D) = sqrt(D) / (b D)
            return QuadExtScalar(0, (self.b * self.D).inverse(), self.D)
        n = self.norm()
        return QuadExtScalar((self.a / n).cancel(), (-self.b / n).cancel(), self.D)

    def __truediv__(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        if o.b.is_zero():
            return QuadExtScalar((s.a / o.a).cancel(), (s.b / o.a).cancel(), s.D)
        return s * o.inverse()

    def __rtruediv__(self, other):
        s, o = self._pair(other)
        if o is None:
            return NotImplemented
        return o / s

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadExtScalar(1, 0, self.D)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def cancel(self):
        return QuadExtScalar(self.a.cancel(), self.b.cancel(), self.D)

    # --------------------------------------------------------------- calculus
    def diff(self, name):
        """d(a + b sqrt D) = da + (db + b dD / (2D)) sqrt D."""
        da = self.a.diff(name)
        db = self.b.diff(name)
        dD = self.D.diff(name)
        if not dD.is_zero() and not self.b.is_zero():
            db = db + self.b * RationalFunction(dD, ((self.D, 1),)) * Fraction(1, 2)
        return QuadExtScalar(da, db, self.D)

    def depends_on(self, name):
        return (
            self.a.depends_on(name)
            or self.b.depends_on(name)
            or (not self.b.is_zero() and self.D.depends_on(name))
        )

    def integrate(self, name):
        """Antiderivative when neither D nor any denominator involves ``name``."""
        if not self.b.is_zero() and self.D.depends_on(name):
            return None
        ia = self.a.integrate(name)
        ib = self.b.integrate(name)
        if ia is None or ib is None:
            return None
        return QuadExtScalar(ia, ib, self.D)

    # --------------------------------------------------------------- helpers
    def evaluate(self, assignment, radical_sign=1):
        a = self.a.evaluate(assignment)
        if self.b.is_zero():
            return a
        b = self.b.evaluate(assignment)
        d = self.D.evaluate(assignment)
        if _is_number(d):
            root = rational_sqrt(d) if d >= 0 else None
            if root is not None:
                val = Fraction(a) + radical_sign * Fraction(b) * root if _is_number(a) and _is_number(b) else a + radical_sign * b * float(root)
                return val
            if d < 0:
                raise NegativeDiscriminant(f"discriminant {d} < 0 in real mode")
            return float(a) + radical_sign * float(b) * math.sqrt(float(d))
        if isinstance(d, complex):
            import cmath

            return a + radical_sign * b * cmath.sqrt(d)
        if d < 0:
            raise NegativeDiscriminant(f"discriminant {d} < 0 in real mode")
        return a + radical_sign * b * math.sqrt(d)

    def subs(self, mapping):
        """Substitute into both parts and the discriminant."""
        a = self.a.subs(mapping)
        b = self.b.subs(mapping)
        D = self.D.subs(mapping)
        if not isinstance(D, Polynomial):
            D = as_rational(D, self.ctx)
            if not D.is_polynomial():
                raise ValueError("substitution must keep the discriminant polynomial")
            D = D.num
        if isinstance(a, QuadExtScalar) or isinstance(b, QuadExtScalar):
            raise ValueError("nested radicals are not supported")
        if D.is_constant() and not as_rational(b, self.ctx).is_zero():
            # a constant perfect square folds into the rational part (positive root)
            c = D.constant_value()
            root = rational_sqrt(c) if c >= 0 else None
            if root is not None:
                return QuadExtScalar(as_rational(a, self.ctx) + as_rational(b, self.ctx) * root, 0, D)
        return QuadExtScalar(a, b, D)

    def rewrite_square(self, name, replacement):
        return QuadExtScalar(
            self.a.rewrite_square(name, replacement),
            self.b.rewrite_square(name, replacement),
            self.D.rewrite_square(name, replacement),
        )

    def embed(self, ctx):
        return QuadExtScalar(self.a.embed(ctx), self.b.embed(ctx), self.D.embed(ctx))

    def __str__(self):
        if self.b.is_zero():
            return str(self.a)
        rad = f"sqrt({self.D})"
        if self.a.is_zero():
            return f"({self.b})*{rad}"
        return f"{self.a} + ({self.b})*{rad}"

    def __repr__(self):
        return f"QuadExtScalar({self})"
