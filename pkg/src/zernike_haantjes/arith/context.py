"""Ordered variable sets shared by every exact expression."""

from __future__ import annotations

PHASE = ("q1", "q2", "p1", "p2")
MIXED = ("Q1", "Q2", "P1", "P2")
GAMMAS = tuple(f"g{n}" for n in range(1, 6))
AUX = ("k1", "k2", "g", "b", "lam", "x1", "x2", "x3")
DEFAULT_NAMES = PHASE + MIXED + GAMMAS + AUX


class ContextMismatch(ValueError):
    pass


class Context:
    """An ordered, immutable tuple of variable names.

    Contexts are interned by their name tuple so that two contexts built from
    the same names are the same object.
    """

    __slots__ = ("names", "index", "nvars", "zero_exp", "__weakref__")
    _interned: dict[tuple[str, ...], "Context"] = {}

    def __new__(cls, names):
        names = tuple(names)
        cached = cls._interned.get(names)
        if cached is not None:
            return cached
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for n in names:
            if not n.isidentifier():
                raise ValueError(f"invalid variable name {n!r}")
        self = object.__new__(cls)
        self.names = names
        self.index = {n: i for i, n in enumerate(names)}
        self.nvars = len(names)
        self.zero_exp = (0,) * len(names)
        cls._interned[names] = self
        return self

    def __reduce__(self):
        return (Context, (self.names,))

    def __repr__(self):
        return f"Context({', '.join(self.names)})"

    def __contains__(self, name):
        return name in self.index

    def var(self, name):
        from .polynomial import Polynomial

        try:
            i = self.index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r} in {self!r}") from None
        exp = [0] * self.nvars
        exp[i] = 1
        return Polynomial(self, {tuple(exp): 1})

    def vars(self, *names):
        return tuple(self.var(n) for n in names)

    def const(self, c):
        from .polynomial import Polynomial

        return Polynomial.constant(self, c)

    def extend(self, *names):
        """Context with extra variables appended (existing order kept)."""
        extra = [n for n in names if n not in self.index]
        return Context(self.names + tuple(extra))


DEFAULT = Context(DEFAULT_NAMES)


def default_context():
    return DEFAULT
