"""Text grammar for exact expressions.

Integers, rationals ``a/b``, variable names, ``+ - * ^``, parentheses and
``sqrt(<poly>)``. Division by a polynomial yields a rational function; a
single discriminant may be introduced per expression through ``sqrt``.
"""

from __future__ import annotations

import ast
from fractions import Fraction

from .context import Context
from .polynomial import Polynomial
from .quadext import QuadExtScalar


class ExpressionSyntaxError(ValueError):
    pass


def parse(text: str, ctx: Context):
    src = text.strip().replace("^", "**")
    if not src:
        raise ExpressionSyntaxError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ExpressionSyntaxError(f"cannot parse {text!r}: {exc.msg}") from None
    return _Walker(ctx, text).visit(tree.body)


class _Walker:
    def __init__(self, ctx, text):
        self.ctx = ctx
        self.text = text
        self.discriminant = None

    def fail(self, msg):
        raise ExpressionSyntaxError(f"{msg} in {self.text!r}")

    def visit(self, node):
        if isinstance(node, ast.Constant):
            if isinstance(node.value, bool) or not isinstance(node.value, int):
                self.fail(f"unsupported literal {node.value!r}")
            return Polynomial.constant(self.ctx, node.value)
        if isinstance(node, ast.Name):
            if node.id not in self.ctx:
                self.fail(f"unknown variable {node.id!r}")
            return self.ctx.var(node.id)
        if isinstance(node, ast.UnaryOp):
            val = self.visit(node.operand)
            if isinstance(node.op, ast.USub):
                return -val
            if isinstance(node.op, ast.UAdd):
                return val
            self.fail("unsupported unary operator")
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                base = self.visit(node.left)
                exp = node.right
                neg = False
                if isinstance(exp, ast.UnaryOp) and isinstance(exp.op, ast.USub):
                    neg, exp = True, exp.operand
                if not (isinstance(exp, ast.Constant) and type(exp.value) is int):
                    self.fail("exponents must be integer literals")
                return base ** (-exp.value if neg else exp.value)
            left = self.visit(node.left)
            right = self.visit(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Sub):
                return left - right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Div):
                if isinstance(left, Polynomial) and isinstance(right, Polynomial):
                    if left.is_constant() and right.is_constant():
                        return Polynomial.constant(
                            self.ctx, Fraction(left.constant_value()) / Fraction(right.constant_value())
                        )
                    if right.is_constant():
                        return left / right.constant_value()
                return left / right
            self.fail("unsupported operator")
        if isinstance(node, ast.Call):
            if not (isinstance(node.func, ast.Name) and node.func.id == "sqrt") or len(node.args) != 1:
                self.fail("only sqrt(<polynomial>) calls are allowed")
            arg = self.visit(node.args[0])
            if not isinstance(arg, Polynomial):
                self.fail("sqrt argument must be a polynomial")
            if self.discriminant is not None and self.discriminant != arg:
                self.fail("only one discriminant per expression")
            self.discriminant = arg
            return QuadExtScalar.sqrt(arg)
        self.fail(f"unsupported syntax {type(node).__name__}")


def to_text(x) -> str:
    """Canonical printer; output parses back to an equal expression."""
    return str(x)
