"""Sparse exact linear systems over Q by fraction-free Gauss-Jordan elimination.

Rows are kept with integer entries and divided by their content after every
elimination step, so no rational arithmetic happens inside the loop.
"""

from __future__ import annotations

import math
from fractions import Fraction


class LinearSystem:
    """Equations sum_u a_u x_u = b with named unknowns.

    ``origin`` tags let an inconsistent system report which source
    equations (e.g. monomials) could not be satisfied.
    """

    def __init__(self):
        self.rows: list[tuple[dict, Fraction, object]] = []
        self.unknowns: dict = {}

    def add_unknown(self, u):
        if u not in self.unknowns:
            self.unknowns[u] = len(self.unknowns)

    def add(self, coeffs: dict, rhs=0, origin=None):
        coeffs = {u: Fraction(c) for u, c in coeffs.items() if c}
        rhs = Fraction(rhs)
        if not coeffs and rhs == 0:
            return
        for u in coeffs:
            self.add_unknown(u)
        self.rows.append((coeffs, rhs, origin))

    def solve(self):
        return solve(self)


class Solution:
    """Affine solution set ``particular + span(nullspace)``, or inconsistent."""

    def __init__(self, consistent, particular=None, nullspace=None, free=None, conflicts=None):
        self.consistent = consistent
        self.particular = particular or {}
        self.nullspace = nullspace or []
        self.free = free or []
        self.conflicts = conflicts or []

    def __repr__(self):
        if not self.consistent:
            return f"Solution(inconsistent, {len(self.conflicts)} conflicts)"
        return f"Solution(dim={len(self.nullspace)})"


def _integer_row(coeffs, rhs, order):
    den = 1
    for c in list(coeffs.values()) + [rhs]:
        den = den * c.denominator // math.gcd(den, c.denominator)
    row = {order[u]: int(c * den) for u, c in coeffs.items()}
    return row, int(rhs * den)


def _content_reduce(row, rhs):
    g = 0
    for v in row.values():
        g = math.gcd(g, v)
    g = math.gcd(g, rhs)
    if g > 1:
        row = {k: v // g for k, v in row.items()}
        rhs //= g
    return row, rhs


def solve(system: LinearSystem) -> Solution:
    order = dict(system.unknowns)
    names = sorted(order, key=order.get)
    rows = []
    origins = []
    for coeffs, rhs, origin in system.rows:
        r, b = _integer_row(coeffs, rhs, order)
        rows.append(_content_reduce(r, b))
        origins.append({origin} if origin is not None else set())
    pivot_rows = {}  # column -> (row, rhs, origins)
    conflicts = []
    for (row, rhs), orig in zip(rows, origins):
        # reduce against existing pivots
        row = dict(row)
        for col in sorted(set(row) & set(pivot_rows)):
            if col not in row:
                continue
            prow, prhs, porig = pivot_rows[col]
            a, p = row[col], prow[col]
            g = math.gcd(a, p)
            fa, fp = p // g, a // g
            new = {k: v * fa for k, v in row.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - fp * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            rhs = rhs * fa - prhs * fp
            row, rhs = _content_reduce(new, rhs)
            orig = orig | porig
        if not row:
            if rhs != 0:
                conflicts.append(orig)
            continue
        col = min(row)
        # eliminate the new pivot column from existing pivot rows (Gauss-Jordan)
        for c, (prow, prhs, porig) in list(pivot_rows.items()):
            if col in prow:
                a, p = prow[col], row[col]
                g = math.gcd(a, p)
                fa, fp = p // g, a // g
                new = {k: v * fa for k, v in prow.items()}
                for k, v in row.items():
                    nv = new.get(k, 0) - fp * v
                    if nv:
                        new[k] = nv
                    else:
                        new.pop(k, None)
                nr, nb = _content_reduce(new, prhs * fa - rhs * fp)
                pivot_rows[c] = (nr, nb, porig | orig)
        pivot_rows[col] = (row, rhs, orig)
    if conflicts:
        return Solution(False, conflicts=conflicts)
    pivots = set(pivot_rows)
    free_cols = [i for i in range(len(names)) if i not in pivots]
    particular = {}
    for col, (row, rhs, _) in pivot_rows.items():
        if rhs:
            particular[names[col]] = Fraction(rhs, row[col])
    nullspace = []
    for f in free_cols:
        vec = {names[f]: Fraction(1)}
        for col, (row, rhs, _) in pivot_rows.items():
            if f in row:
                vec[names[col]] = Fraction(-row[f], row[col])
        nullspace.append(vec)
    return Solution(True, particular, nullspace, [names[f] for f in free_cols])
