"""Exact arithmetic: sparse polynomials over Q, rational functions with
factored denominators, and a quadratic extension by one square root."""

from .context import DEFAULT, Context, ContextMismatch, default_context
from .ops import (
    cancel,
    clear_denominator,
    collect,
    common_denominator,
    depends_on,
    differentiate,
    equals,
    evaluate,
    integrate,
    is_number,
    is_zero,
    lift,
    numerators,
    poly_arith,
    rewrite_square,
    subs,
)
from .parse import ExpressionSyntaxError, parse, to_text
from .polynomial import Polynomial
from .quadext import DiscriminantMismatch, NegativeDiscriminant, QuadExtScalar
from .rational import RationalFunction, as_rational

__all__ = [
    "DEFAULT",
    "Context",
    "ContextMismatch",
    "DiscriminantMismatch",
    "ExpressionSyntaxError",
    "NegativeDiscriminant",
    "Polynomial",
    "QuadExtScalar",
    "RationalFunction",
    "as_rational",
    "cancel",
    "clear_denominator",
    "collect",
    "common_denominator",
    "default_context",
    "depends_on",
    "differentiate",
    "equals",
    "evaluate",
    "integrate",
    "is_number",
    "is_zero",
    "lift",
    "numerators",
    "parse",
    "poly_arith",
    "rewrite_square",
    "subs",
    "to_text",
]
