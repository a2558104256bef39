"""Structured pass/fail records produced by every checker."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager

from .arith import QuadExtScalar, RationalFunction, is_number, numerators, rewrite_square

SCHEMA_VERSION = 1
PASS, FAIL, RECORDED = "pass", "fail", "recorded"
_HEAD_CHARS = 120


def normalize(x, rules=()):
    """Apply ``name^2 -> replacement`` rewrite rules to the numerator parts of ``x``."""
    for name, repl in rules:
        if isinstance(x, RationalFunction):
            x = x.map_numerator(lambda p: p.rewrite_square(name, repl))
        elif isinstance(x, QuadExtScalar):
            x = QuadExtScalar(
                x.a.map_numerator(lambda p: p.rewrite_square(name, repl)),
                x.b.map_numerator(lambda p: p.rewrite_square(name, repl)),
                x.D,
            )
        else:
            x = rewrite_square(x, name, repl)
    return x


def vanishes(x, rules=()) -> bool:
    """Exact zero test of a residual after the rewrite rules."""
    if is_number(x):
        return x == 0
    return all(p.is_zero() for p in numerators(normalize(x, rules)))


def head(x) -> str:
    """Short printable summary of a nonzero residual."""
    if isinstance(x, QuadExtScalar):
        part = x.a if not x.a.is_zero() else x.b
        tag = "rational part" if not x.a.is_zero() else "radical part"
        return f"{tag}: {head(part)}"
    if isinstance(x, RationalFunction):
        x = x.num
    if is_number(x):
        return str(x)
    terms = x.sorted_terms()
    s = str(type(x)(x.ctx, dict(terms[:3])))
    if len(terms) > 3:
        s += f" + ... ({len(terms)} terms)"
    return s[:_HEAD_CHARS]


class Check:
    """One identity or property with its outcome."""

    def __init__(self, ident, anchor, status, residual="zero", detail=None, seconds=0.0):
        self.ident = ident
        self.anchor = anchor
        self.status = status
        self.residual = residual
        self.detail = detail if detail is not None else {}
        self.seconds = seconds

    @property
    def passed(self):
        return self.status != FAIL

    def to_dict(self, with_times=False):
        d = {
            "id": self.ident,
            "anchor": self.anchor,
            "status": self.status,
            "residual": self.residual,
        }
        if self.detail:
            d["detail"] = self.detail
        if with_times:
            d["seconds"] = round(self.seconds, 4)
        return d

    def __repr__(self):
        return f"Check({self.ident!r}, {self.status}, {self.residual!r})"


def residual_check(ident, anchor, residuals, rules=(), detail=None):
    """Pass iff every residual vanishes exactly; summary cites the first nonzero one."""
    if not isinstance(residuals, (list, tuple)):
        residuals = [residuals]
    bad = [(i, r) for i, r in enumerate(residuals) if not vanishes(r, rules)]
    if not bad:
        return Check(ident, anchor, PASS, "zero", detail)
    i, r = bad[0]
    d = dict(detail or {})
    d["nonzero_components"] = [j for j, _ in bad]
    return Check(ident, anchor, FAIL, head(normalize(r, rules)), d)


def float_check(ident, anchor, max_residual, tol, detail=None):
    status = PASS if max_residual < tol else FAIL
    return Check(ident, anchor, status, f"max {max_residual:.3e} (tol {tol:.0e})", detail)


class VerificationReport:
    def __init__(self, name, params=None):
        self.name = name
        self.params = dict(params or {})
        self.checks: list[Check] = []

    def add(self, check: Check):
        self.checks.append(check)
        return check

    def extend(self, other: "VerificationReport", prefix=None):
        for c in other.checks:
            if prefix:
                c = Check(f"{prefix}.{c.ident}", c.anchor, c.status, c.residual, c.detail, c.seconds)
            self.checks.append(c)
        return self

    @contextmanager
    def timed(self):
        """Attach wall time to every check added inside the block."""
        start = len(self.checks)
        t0 = time.perf_counter()
        yield self
        dt = time.perf_counter() - t0
        added = self.checks[start:]
        for c in added:
            c.seconds = dt / len(added)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self, with_times=False):
        counts = {PASS: 0, FAIL: 0, RECORDED: 0}
        for c in self.checks:
            counts[c.status] += 1
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.name,
            "params": self.params,
            "status": PASS if self.passed else FAIL,
            "counts": counts,
            "checks": [c.to_dict(with_times) for c in self.checks],
        }

    def to_json(self, with_times=False):
        return json.dumps(self.to_dict(with_times), indent=2, sort_keys=True) + "\n"

    def to_text(self, with_times=False):
        lines = [f"suite {self.name}: {'PASS' if self.passed else 'FAIL'}"]
        if self.params:
            lines.append("  params: " + ", ".join(f"{k}={v}" for k, v in sorted(self.params.items())))
        for c in self.checks:
            t = f" [{c.seconds:.3f}s]" if with_times else ""
            lines.append(f"  {c.status.upper():8s} {c.ident}: {c.residual}{t}")
            lines.append(f"           ({c.anchor})")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return f"VerificationReport({self.name!r}, {len(self.checks)} checks, passed={self.passed})"
