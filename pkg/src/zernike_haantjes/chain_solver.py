"""Step A: solve the chain equation K^T dH = dI for compatible operators under
a polynomial ansatz, then keep the members with vanishing Haantjes torsion."""

from __future__ import annotations

import itertools
from fractions import Fraction

from .arith import DEFAULT, Context, Polynomial, parse
from .linsolve import LinearSystem
from .phase_space import COORDS, differential
from .report import vanishes
from .tensor import TensorField11, haantjes_torsion

# Independent unknown entries of a compatible operator (A, B; C, A^T) with
# B, C skew. Each maps to the matrix positions it fills and their signs.
ENTRY_POSITIONS = {
    "a11": (((0, 0), 1), ((2, 2), 1)),
    "a12": (((0, 1), 1), ((3, 2), 1)),
    "a21": (((1, 0), 1), ((2, 3), 1)),
    "a22": (((1, 1), 1), ((3, 3), 1)),
    "b12": (((0, 3), 1), ((1, 2), -1)),
    "c12": (((2, 1), 1), ((3, 0), -1)),
}
ENTRY_BLOCK = {"a11": "A", "a12": "A", "a21": "A", "a22": "A", "b12": "B", "c12": "C"}


def monomials(names, degree, ctx):
    """Exponent tuples (in ``ctx`` order) of total degree <= ``degree`` in ``names``."""
    if degree < 0:
        return []
    idx = [ctx.index[n] for n in names]
    out = []
    for d in range(degree + 1):
        for combo in itertools.combinations_with_replacement(idx, d):
            e = [0] * ctx.nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return sorted(set(out), key=lambda e: (sum(e), e))


class AnsatzSpec:
    """Polynomial ansatz for a compatible operator.

    ``degrees`` maps block name (A, B, C) to the maximal total degree in
    (q, p); -1 forces the block to zero. ``allowed`` maps entry names
    (a11, ..., c12) or block names to the phase variables they may use.
    ``params`` lists parameter symbols; their monomials up to
    ``param_degree`` multiply every unknown coefficient. Alternatively
    ``param_monomials`` gives the parameter monomials explicitly (as
    expressions or exponent tuples), see :func:`divisor_monomials`.
    """

    def __init__(self, degrees=None, allowed=None, params=("g1", "g2"), param_degree=1,
                 param_monomials=None):
        self.degrees = {"A": 2, "B": 2, "C": 2}
        if degrees is not None:
            if isinstance(degrees, int):
                degrees = {"A": degrees, "B": degrees, "C": degrees}
            self.degrees.update(degrees)
        for v in self.degrees.values():
            if v < -1:
                raise ValueError("block degrees must be >= -1")
        self.allowed = dict(allowed or {})
        self.params = tuple(params)
        self.param_degree = param_degree
        self.param_monomials = None if param_monomials is None else tuple(param_monomials)

    def parameter_exponents(self, ctx=DEFAULT):
        if self.param_monomials is None:
            return monomials(self.params, self.param_degree, ctx)
        out = set()
        for m in self.param_monomials:
            if isinstance(m, tuple):
                out.add(m)
                continue
            if isinstance(m, str):
                m = parse(m, ctx)
            if isinstance(m, int):
                m = ctx.const(m)
            if len(m.terms) != 1:
                raise ValueError(f"parameter monomial expected, got {m}")
            out.add(next(iter(m.terms)))
        return sorted(out, key=lambda e: (sum(e), e))

    def entry_vars(self, entry):
        if entry in self.allowed:
            return tuple(self.allowed[entry])
        return tuple(self.allowed.get(ENTRY_BLOCK[entry], COORDS))

    def unknowns(self, ctx=DEFAULT):
        """Sorted unknown labels (entry, phase exponent, parameter exponent)."""
        pmons = self.parameter_exponents(ctx)
        out = []
        for entry in ENTRY_POSITIONS:
            deg = self.degrees[ENTRY_BLOCK[entry]]
            for m in monomials(self.entry_vars(entry), deg, ctx):
                for pm in pmons:
                    e = tuple(a + b for a, b in zip(m, pm))
                    out.append((entry, m, pm, e))
        return out

    def to_dict(self):
        return {
            "degrees": dict(self.degrees),
            "allowed": {k: list(v) for k, v in sorted(self.allowed.items())},
            "params": list(self.params),
            "param_degree": self.param_degree,
            "param_monomials": None if self.param_monomials is None else [str(m) for m in self.param_monomials],
        }


def divisor_monomials(I, phase=COORDS, ctx=DEFAULT):
    """Parameter monomials dividing some parameter monomial of ``I``.

    If every coefficient of H carries a parameter monomial, then products
    with the entries of K can only produce the parameter monomials of I
    when the K coefficients divide them (or cancel among themselves); this
    is the default parameter ansatz for parametric targets.
    """
    if isinstance(I, int):
        I = ctx.const(I)
    phase_idx = {ctx.index[n] for n in phase}
    found = set()
    for e in I.terms:
        pe = tuple(0 if i in phase_idx else v for i, v in enumerate(e))
        found.add(pe)
    out = set()
    for pe in found:
        ranges = [range(v + 1) for v in pe]
        for d in itertools.product(*ranges):
            out.add(tuple(d))
    return sorted(out, key=lambda e: (sum(e), e))


def momentum_free_A(degree=2, params=("g1", "g2"), param_degree=1):
    """The normalization used for lift-form operators: A depends on q only."""
    return AnsatzSpec({"A": degree, "B": degree, "C": degree}, {"A": ("q1", "q2")}, params, param_degree)


class LinearSolutionFamily:
    """``particular + sum_k t_k basis[k]``; empty when the system is inconsistent."""

    def __init__(self, particular, basis, free_names, ansatz, unknown_labels=None, diagnostics=None,
                 particular_vec=None, basis_vecs=None):
        self.particular = particular
        self.basis = basis
        self.free_names = free_names
        self.ansatz = ansatz
        self.labels = unknown_labels or []
        self.diagnostics = diagnostics or {}
        self.particular_vec = particular_vec or {}
        self.basis_vecs = basis_vecs or []

    @property
    def empty(self):
        return self.particular is None

    @property
    def dimension(self):
        return len(self.basis)

    def member(self, coeffs, ctx=DEFAULT):
        K = self.particular
        for t, B in zip(coeffs, self.basis):
            if t:
                K = K + B.scale(t)
        return K

    def coordinates_of(self, K: TensorField11, ctx=DEFAULT):
        """Coefficients t with K = particular + sum t_k basis_k, or None if K is not in the family."""
        if self.empty:
            return None
        vec = tensor_to_vector(K, self.labels, self.ansatz, ctx)
        if vec is None:
            return None
        t = []
        for f in self.free_names:
            t.append(vec.get(f, Fraction(0)) - self.particular_vec.get(f, Fraction(0)))
        # verify every coordinate
        recon = dict(self.particular_vec)
        for tk, bv in zip(t, self.basis_vecs):
            if tk:
                for u, c in bv.items():
                    recon[u] = recon.get(u, 0) + tk * c
        keys = set(recon) | set(vec)
        if all(recon.get(u, 0) == vec.get(u, 0) for u in keys):
            return t
        return None

    def contains(self, K, ctx=DEFAULT):
        return self.coordinates_of(K, ctx) is not None


def _label_tensor(labels_coeffs, ctx):
    """Tensor sum_u c_u * basis(u) for a dict label -> coefficient."""
    entries = {name: {} for name in ENTRY_POSITIONS}
    for (entry, _m, _pm, e), c in labels_coeffs:
        if c:
            d = entries[entry]
            d[e] = d.get(e, 0) + c
    rows = [[0] * 4 for _ in range(4)]
    for name, terms in entries.items():
        terms = {e: (int(c) if Fraction(c).denominator == 1 else Fraction(c)) for e, c in terms.items() if c}
        if not terms:
            continue
        p = Polynomial(ctx, terms)
        for (i, j), sign in ENTRY_POSITIONS[name]:
            rows[i][j] = p if sign == 1 else -p
    return TensorField11(rows, ctx)


def tensor_to_vector(K: TensorField11, labels, ansatz, ctx=DEFAULT):
    """Unknown-coefficient vector of a compatible polynomial tensor, or None if outside the ansatz."""
    lookup = {(l[0], l[3]): l for l in labels}
    vec = {}
    for name, positions in ENTRY_POSITIONS.items():
        (i, j), sign = positions[0]
        e = K.rows[i][j]
        if isinstance(e, int) or isinstance(e, Fraction):
            e = ctx.const(e)
        if not isinstance(e, Polynomial):
            if hasattr(e, "is_polynomial") and e.is_polynomial():
                e = e.num
            else:
                return None
        for exp, c in e.terms.items():
            lab = lookup.get((name, exp))
            if lab is None:
                return None
            vec[lab] = Fraction(c) * sign
    # the mirrored positions must be consistent with the block form
    if not vanishes_all(K, _label_tensor(list(vec.items()), ctx)):
        return None
    return vec


def vanishes_all(K1, K2):
    return all(vanishes(a - b) for a, b in zip(K1.entries(), K2.entries()))


def solve_chain(H, I, ansatz: AnsatzSpec, ctx=DEFAULT) -> LinearSolutionFamily:
    """All compatible operators in the ansatz with K^T dH = dI (coefficients matched per
    monomial in phase variables and parameters jointly)."""
    labels = ansatz.unknowns(ctx)
    dH = differential(H)
    dI = differential(I)
    system = LinearSystem()
    for lab in labels:
        system.add_unknown(lab)
    # (K^T dH)_j = sum_i K^i_j dH_i
    eqs: dict = {}
    for lab in labels:
        entry, _m, _pm, e = lab
        mono = Polynomial(ctx, {e: 1})
        for (i, j), sign in ENTRY_POSITIONS[entry]:
            dHi = dH[i]
            if isinstance(dHi, int) and dHi == 0:
                continue
            contrib = mono * dHi
            for exp, c in contrib.terms.items():
                row = eqs.setdefault((j, exp), {})
                row[lab] = row.get(lab, 0) + sign * c
    rhs: dict = {}
    for j in range(4):
        dIj = dI[j]
        if isinstance(dIj, int):
            dIj = ctx.const(dIj)
        for exp, c in dIj.terms.items():
            rhs[(j, exp)] = c
            eqs.setdefault((j, exp), {})
    for key in sorted(eqs, key=lambda k: (k[0], sum(k[1]), k[1])):
        system.add(eqs[key], rhs.get(key, 0), origin=key)
    sol = system.solve()
    if not sol.consistent:
        bad = sorted({o for group in sol.conflicts for o in group}, key=lambda k: (k[0], sum(k[1]), k[1]))
        names = [f"d{COORDS[j]}: {Polynomial(ctx, {exp: 1})}" for j, exp in bad[:20]]
        return LinearSolutionFamily(None, [], [], ansatz, labels,
                                    {"inconsistent": True, "uncancelled_monomials": names})
    particular = _label_tensor(list(sol.particular.items()), ctx)
    basis = [_label_tensor(list(v.items()), ctx) for v in sol.nullspace]
    return LinearSolutionFamily(particular, basis, sol.free, ansatz, labels,
                                {"unknowns": len(labels), "equations": len(system.rows)},
                                dict(sol.particular), [dict(v) for v in sol.nullspace])


# ------------------------------------------------------------ Haantjes filter
def _torsion_equations(family: LinearSolutionFamily, ctx):
    """Haantjes torsion of the symbolic member as polynomials in the free coefficients."""
    k = family.dimension
    tnames = tuple(f"t{i}" for i in range(k))
    big = Context(ctx.names + tnames)
    K = family.particular.map(lambda e: _embed(e, big))
    for i, B in enumerate(family.basis):
        K = K + B.map(lambda e: _embed(e, big)).scale(big.var(tnames[i]))
    K.ctx = big
    T = haantjes_torsion(K)
    eqs = {}
    tidx = [big.index[t] for t in tnames]
    for comp in T.independent():
        if isinstance(comp, int):
            continue
        for e, c in comp.terms.items():
            key = tuple(0 if i in tidx else v for i, v in enumerate(e))
            texp = tuple(e[i] for i in tidx)
            d = eqs.setdefault(key, {})
            d[texp] = d.get(texp, 0) + c
    out = []
    for d in eqs.values():
        d = {t: c for t, c in d.items() if c}
        if d:
            out.append(d)
    return out, k


def _embed(e, big):
    if isinstance(e, (int, Fraction)):
        return e
    return e.embed(big)


def _propagate(eqs, k):
    """Linear / triangular reduction of polynomial equations in t.

    Equations are dicts {t-exponent: coefficient}. Returns (fixed values,
    remaining equations) or None when a contradiction is found.
    """
    fixed: dict = {}
    while True:
        progress = False
        new_eqs = []
        for d in eqs:
            d = _substitute(d, fixed)
            if d is None:
                return None
            if not d:
                continue
            new_eqs.append(d)
        eqs = new_eqs
        # single monomial: c * prod t^e = 0 with one variable -> that variable is 0
        for d in eqs:
            if len(d) == 1:
                (texp, _c), = d.items()
                vars_in = [i for i, v in enumerate(texp) if v]
                if not vars_in:
                    return None
                if len(vars_in) == 1:
                    fixed[vars_in[0]] = Fraction(0)
                    progress = True
                    break
        if progress:
            continue
        # purely linear equations: solve them together
        lin = [d for d in eqs if all(sum(t) <= 1 for t in d)]
        if lin:
            system = LinearSystem()
            for i in range(k):
                system.add_unknown(i)
            for d in lin:
                coeffs = {}
                rhs = 0
                for texp, c in d.items():
                    if sum(texp) == 0:
                        rhs -= c
                    else:
                        coeffs[texp.index(1)] = c
                system.add(coeffs, rhs)
            sol = system.solve()
            if not sol.consistent:
                return None
            determined = [i for i in range(k) if i not in sol.free and all(i not in v for v in sol.nullspace)]
            for i in determined:
                if i not in fixed:
                    fixed[i] = sol.particular.get(i, Fraction(0))
                    progress = True
        if not progress:
            return fixed, eqs


def _substitute(d, fixed):
    if not fixed:
        return d
    out = {}
    for texp, c in d.items():
        coef = Fraction(c)
        e = list(texp)
        for i, v in fixed.items():
            if e[i]:
                coef *= v ** e[i]
                e[i] = 0
        if coef:
            key = tuple(e)
            out[key] = out.get(key, 0) + coef
    out = {t: c for t, c in out.items() if c}
    if len(out) == 1 and sum(next(iter(out))) == 0:
        return None
    return out


class FilterResult:
    def __init__(self, members, diagnostics):
        self.members = members
        self.diagnostics = diagnostics

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)


def filter_haantjes(family: LinearSolutionFamily, candidates=(), ctx=DEFAULT, corner_limit=6,
                    rules=()) -> FilterResult:
    """Members of the family with vanishing Haantjes torsion.

    The torsion conditions are polynomial in the free coefficients. Linear
    and triangular parts are solved exactly; if coefficients stay
    undetermined, a finite candidate set (corners of {-1, 0, 1}^k for small
    k, the propagated point, and the supplied catalog tensors) is verified
    member by member.
    """
    diag = {"dimension": family.dimension}
    if family.empty:
        diag["empty_family"] = True
        return FilterResult([], diag)
    k = family.dimension
    points = []
    if k == 0:
        points.append(())
    else:
        eqs, _ = _torsion_equations(family, ctx)
        diag["torsion_equations"] = len(eqs)
        res = _propagate(eqs, k)
        if res is None:
            diag["propagation"] = "contradiction"
        else:
            fixed, remaining = res
            diag["fixed"] = len(fixed)
            diag["remaining_equations"] = len(remaining)
            free = [i for i in range(k) if i not in fixed]
            if not remaining and not free:
                points.append(tuple(fixed[i] for i in range(k)))
                diag["method"] = "linear"
            else:
                diag["method"] = "candidates"
                base = [fixed.get(i, Fraction(0)) for i in range(k)]
                points.append(tuple(base))
                if len(free) <= corner_limit:
                    for combo in itertools.product((-1, 0, 1), repeat=len(free)):
                        p = list(base)
                        for i, v in zip(free, combo):
                            p[i] = Fraction(v)
                        points.append(tuple(p))
                if not remaining:
                    diag["free_after_propagation"] = len(free)
    for K in candidates:
        t = family.coordinates_of(K, ctx)
        if t is not None:
            points.append(tuple(t))
    seen = set()
    members = []
    for p in sorted(set(points)):
        if p in seen:
            continue
        seen.add(p)
        K = family.member(p, ctx)
        if haantjes_torsion(K).is_zero(rules):
            members.append((p, K))
    diag["verified"] = len(members)
    return FilterResult(members, diag)
