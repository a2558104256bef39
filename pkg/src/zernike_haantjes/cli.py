"""Command-line front end: run named suites, list them, solve chain equations,
compare reports.

Exit codes: 0 all checks pass, 1 some check failed, 2 usage error or
unknown suite, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback

from .arith import DEFAULT, ExpressionSyntaxError, parse, to_text
from .chain_solver import AnsatzSpec, divisor_monomials, filter_haantjes, solve_chain
from .suites import SUITES, UnknownSuite, suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


def _add_run_flags(p):
    p.add_argument("suite_name", nargs="?", help="suite to run, or 'all'")
    p.add_argument("--suite", dest="suite_flag", help="same as the positional suite name")
    p.add_argument("--N", type=int, help="family order (chain, separated, solver, obstruction)")
    p.add_argument("--k1", help="elliptic parameter k1 (rational, e.g. 3/5)")
    p.add_argument("--k2", help="elliptic parameter k2 (rational, e.g. 4/5)")
    p.add_argument("--gamma1", help="value for gamma1 (expression)")
    p.add_argument("--gamma2", help="value for gamma2 (expression)")
    p.add_argument("--deg", type=int, help="ansatz degree for the solver suite")
    p.add_argument("--seed", type=int, help="random seed for sampled checks")
    p.add_argument("--samples", type=int, help="sample count for sampled checks")
    p.add_argument("--tol", type=float, help="relative tolerance for float checks")
    p.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")
    p.add_argument("--out", help="directory for <suite>.json and <suite>.txt reports")
    p.add_argument("--times", action="store_true", help="include wall times (reports stop being reproducible)")


def build_parser():
    parser = argparse.ArgumentParser(prog="zernike-haantjes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command")

    _add_run_flags(sub.add_parser("run", help="run a verification suite"))

    p = sub.add_parser("list", help="list suites")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("solve", help="solve K^T dH = dI and filter Haantjes members")
    p.add_argument("--H", required=True, help="Hamiltonian, e.g. 'p1^2 + p2^2 + g1*(q1*p1 + q2*p2)'")
    p.add_argument("--I", required=True, help="integral, e.g. '(1 + g2*(q1^2 + q2^2))*p2^2 + g1*q2*p2'")
    p.add_argument("--deg", type=int, default=2, help="maximal entry degree in (q, p)")
    p.add_argument("--params", default="g1,g2", help="comma separated parameter symbols ('' for none)")
    p.add_argument("--param-degree", type=int, default=1)
    p.add_argument("--divisor-params", action="store_true",
                   help="use divisors of the parameter monomials of I as the parameter ansatz")
    p.add_argument("--name", default="solved", help="fixture section name")
    p.add_argument("--out", help="fixture file (default stdout)")

    p = sub.add_parser("report-diff", help="compare two JSON reports")
    p.add_argument("a")
    p.add_argument("b")
    return parser


def _params(args):
    keys = ("N", "k1", "k2", "gamma1", "gamma2", "deg", "seed", "samples", "tol")
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def _emit(reports, args):
    for rep in reports:
        if args.format == "json":
            sys.stdout.write(rep.to_json(args.times))
        else:
            sys.stdout.write(rep.to_text(args.times))
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, f"{rep.name}.json"), "w") as f:
                f.write(rep.to_json(args.times))
            with open(os.path.join(args.out, f"{rep.name}.txt"), "w") as f:
                f.write(rep.to_text(args.times))


def cmd_run(args):
    name = args.suite_flag or args.suite_name
    if not name:
        print("run: a suite name is required (see 'list')", file=sys.stderr)
        return EXIT_USAGE
    names = list(SUITES) if name == "all" else [name]
    try:
        descriptors = [suite(n) for n in names]
    except UnknownSuite as e:
        print(f"unknown suite: {e.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    params = _params(args)
    reports = []
    for d in descriptors:
        try:
            reports.append(d.run(params))
        except (ExpressionSyntaxError, ValueError) as e:
            print(f"{d.name}: {e}", file=sys.stderr)
            return EXIT_USAGE
    _emit(reports, args)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_list(args):
    if args.format == "json":
        print(json.dumps([d.to_dict() for d in SUITES.values()], indent=2))
    else:
        for d in SUITES.values():
            flags = " ".join(f"--{p}" for p in d.params)
            print(f"{d.name:20s} {d.description}" + (f"  [{flags}]" if flags else ""))
    return EXIT_OK


def fixture_text(name, members, family, I, ansatz):
    """Solved operators as catalog-style INI sections."""
    lines = [
        "# chain solution K^T dH = dI",
        f"# ansatz: {json.dumps(ansatz.to_dict(), sort_keys=True)}",
        f"# family dimension: {family.dimension}",
    ]
    if family.empty:
        lines.append("# no solution; uncancelled monomials:")
        for m in family.diagnostics.get("uncancelled_monomials", []):
            lines.append(f"#   {m}")
        return "\n".join(lines) + "\n"
    lines.append(f"# Haantjes members: {len(members)}")
    for n, (t, K) in enumerate(members):
        section = name if len(members) == 1 else f"{name}_{n + 1}"
        lines.append("")
        lines.append(f"[{section}]")
        lines.append("kind = haantjes")
        for i, row in enumerate(K.rows):
            lines.append(f"row{i + 1} = " + " | ".join(to_text(e) for e in row))
        lines.append(f"integral = {to_text(I)}")
        lines.append("coordinates = " + ", ".join(str(x) for x in t))
    return "\n".join(lines) + "\n"


def cmd_solve(args):
    ctx = DEFAULT
    try:
        H = parse(args.H, ctx)
        I = parse(args.I, ctx)
    except (ExpressionSyntaxError, KeyError) as e:
        print(f"solve: {e}", file=sys.stderr)
        return EXIT_USAGE
    params = tuple(p.strip() for p in args.params.split(",") if p.strip())
    pm = divisor_monomials(I, ctx=ctx) if args.divisor_params else None
    ansatz = AnsatzSpec(args.deg, params=params, param_degree=args.param_degree, param_monomials=pm)
    family = solve_chain(H, I, ansatz, ctx)
    members = [] if family.empty else filter_haantjes(family, (), ctx).members
    text = fixture_text(args.name, members, family, I, ansatz)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if members else EXIT_FAIL


def _load_report(path):
    with open(path) as f:
        return json.load(f)


def cmd_report_diff(args):
    try:
        a, b = _load_report(args.a), _load_report(args.b)
    except (OSError, json.JSONDecodeError) as e:
        print(f"report-diff: {e}", file=sys.stderr)
        return EXIT_USAGE
    diffs = []
    for key in ("suite", "params", "status", "counts"):
        if a.get(key) != b.get(key):
            diffs.append(f"{key}: {a.get(key)!r} != {b.get(key)!r}")
    ca = {c["id"]: c for c in a.get("checks", [])}
    cb = {c["id"]: c for c in b.get("checks", [])}
    for ident in sorted(set(ca) | set(cb)):
        x, y = ca.get(ident), cb.get(ident)
        if x is None or y is None:
            diffs.append(f"{ident}: only in {'b' if x is None else 'a'}")
            continue
        for field in ("status", "residual", "anchor", "detail"):
            if x.get(field) != y.get(field):
                diffs.append(f"{ident}.{field}: {x.get(field)!r} != {y.get(field)!r}")
    for d in diffs:
        print(d)
    if not diffs:
        print("reports agree")
    return EXIT_OK if not diffs else EXIT_FAIL


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    commands = {"run": cmd_run, "list": cmd_list, "solve": cmd_solve, "report-diff": cmd_report_diff}
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    try:
        return commands[args.command](args)
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
